#pragma once

// Verification drivers behind the command-line tool. Each driver turns a
// RunConfig into a list of rows comparing the two sides of an identity.
// Failures are recorded per row; one bad cell never aborts the grid.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "kpz/airy_side.hpp"
#include "kpz/errors.hpp"
#include "kpz/kpz_side.hpp"
#include "kpz/montecarlo.hpp"
#include "kpz/params.hpp"

namespace kpz::verify {

enum class Command { Theorem1, Theorem2, TwLimit, McCheck };

inline const char* command_name(Command c) {
  switch (c) {
    case Command::Theorem1: return "verify-theorem1";
    case Command::Theorem2: return "verify-theorem2";
    case Command::TwLimit: return "tw-limit";
    case Command::McCheck: return "mc-check";
  }
  return "?";
}

enum class Format { Csv, Json };

struct RunConfig {
  Command command = Command::Theorem2;
  std::optional<std::vector<double>> C_list;
  std::optional<std::vector<double>> T_list;
  std::optional<std::vector<double>> u_list;
  std::optional<std::vector<double>> a_list;
  std::optional<int> k_max;
  std::optional<int> nodes;
  int samples = 2000;
  int matrix_size = 400;
  int keep_top = 48;
  std::uint64_t seed = 20240611;
  std::optional<double> tol;
  Format format = Format::Csv;
  std::string output_path;  // empty: standard output
  unsigned threads = 0;     // 0: hardware concurrency
};

struct VerificationRow {
  std::string quantity;  // mc-check only: "h_moment" or "mult_stat"
  std::optional<int> k;
  std::optional<double> u;
  std::optional<double> a;
  double C = 0.0;
  double T = 0.0;
  double lhs = std::numeric_limits<double>::quiet_NaN();
  double rhs = std::numeric_limits<double>::quiet_NaN();
  double abs_diff = std::numeric_limits<double>::quiet_NaN();
  double rel_diff = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  std::optional<int> nodes;
  std::optional<double> std_error;
  std::optional<double> bias_bound;
  std::optional<bool> flagged;
  std::optional<bool> nonincreasing;
  bool pass = false;
  std::string error;

  void set_values(double l, double r) {
    lhs = l;
    rhs = r;
    abs_diff = std::fabs(l - r);
    rel_diff = abs_diff / std::max(std::fabs(r), 1e-300);
  }
};

// Grids used when a list is not supplied.
inline const std::vector<double> kDefaultTheorem2C = {0.6, 1.0, 1.4};
inline const std::vector<double> kDefaultTheorem1C = {0.8, 1.0, 1.6};
inline const std::vector<double> kDefaultTheorem1U = {0.1, 1.0, 10.0};
inline const std::vector<double> kDefaultTwT = {8.0, 64.0, 512.0};
inline const std::vector<double> kDefaultTwA = {-2.0, -1.0, 0.0, 1.0};
inline const std::vector<double> kDefaultMcC = {0.5};
inline const std::vector<double> kDefaultMcU = {1.0};

inline constexpr double kTheorem2Tol = 1e-5;
inline constexpr double kTheorem2Tol4 = 1e-3;
inline constexpr double kTheorem1Tol = 1e-6;
inline constexpr double kTwTol = 0.05;
inline constexpr double kMcHTol = 0.07;
inline constexpr double kMcMultTol = 0.03;

inline double C_of_T(double T) { return std::cbrt(T / 2.0); }
inline double T_of_C(double C) { return 2.0 * C * C * C; }

namespace detail {

// Runs job(i) for i in [0, n), at most `threads` at a time. Results are
// written by index, so order never depends on scheduling.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) job(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline void fail_row(VerificationRow& row, const std::exception& e) {
  row.pass = false;
  row.error = e.what();
}

inline void check_positive_list(const std::vector<double>& v, const char* name) {
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw ConfigurationError(std::string(name) + " entries must be positive and finite");
    }
  }
}

// The C ladder of a run: --C as given, or derived from --T.
inline std::vector<double> resolve_C(const RunConfig& cfg, const std::vector<double>& fallback) {
  if (cfg.C_list && cfg.T_list) {
    throw ConfigurationError("supply either a C list or a T list, not both");
  }
  if (cfg.T_list) {
    check_positive_list(*cfg.T_list, "T");
    std::vector<double> out;
    for (double T : *cfg.T_list) out.push_back(C_of_T(T));
    return out;
  }
  const auto& c = cfg.C_list ? *cfg.C_list : fallback;
  check_positive_list(c, "C");
  return c;
}

inline std::vector<double> resolve_T(const RunConfig& cfg, const std::vector<double>& fallback) {
  if (cfg.C_list && cfg.T_list) {
    throw ConfigurationError("supply either a C list or a T list, not both");
  }
  if (cfg.C_list) {
    check_positive_list(*cfg.C_list, "C");
    std::vector<double> out;
    for (double C : *cfg.C_list) out.push_back(T_of_C(C));
    return out;
  }
  const auto& t = cfg.T_list ? *cfg.T_list : fallback;
  check_positive_list(t, "T");
  return t;
}

inline void check_nodes(const RunConfig& cfg) {
  if (cfg.nodes && (*cfg.nodes < 1 || *cfg.nodes > quad::kMaxHermiteNodes)) {
    throw ConfigurationError("nodes must be in [1, 256]");
  }
}

}  // namespace detail

// lhs = airy_h_moment(k, C), rhs = kpz_moment(k, 2 C^3), rows in (C, k) order.
inline std::vector<VerificationRow> run_verify_theorem2(const RunConfig& cfg) {
  const auto Cs = detail::resolve_C(cfg, kDefaultTheorem2C);
  const int k_max = cfg.k_max.value_or(4);
  if (k_max < 1 || k_max > 4) throw ConfigurationError("k-max must be in [1, 4]");
  detail::check_nodes(cfg);
  const TensorNodes nodes = cfg.nodes ? TensorNodes::uniform(*cfg.nodes) : TensorNodes{};
  std::vector<VerificationRow> rows;
  for (double C : Cs) {
    for (int k = 1; k <= k_max; ++k) {
      VerificationRow r;
      r.k = k;
      r.C = C;
      r.T = T_of_C(C);
      r.nodes = nodes.for_dim(static_cast<std::size_t>(k));
      r.tolerance = cfg.tol.value_or(k <= 3 ? kTheorem2Tol : kTheorem2Tol4);
      rows.push_back(r);
    }
  }
  detail::parallel_for(rows.size(), cfg.threads, [&](std::size_t i) {
    auto& r = rows[i];
    try {
      r.set_values(airy_side::airy_h_moment(*r.k, r.C, nodes), kpz_side::kpz_moment(*r.k, r.T, nodes));
      r.pass = r.rel_diff < r.tolerance;
    } catch (const std::exception& e) {
      detail::fail_row(r, e);
    }
  });
  return rows;
}

// lhs = airy_mult_stat(u, C), rhs = kpz_laplace(u, T = 2 C^3), rows in (C, u) order.
inline std::vector<VerificationRow> run_verify_theorem1(const RunConfig& cfg) {
  const auto Cs = detail::resolve_C(cfg, kDefaultTheorem1C);
  const auto& us = cfg.u_list ? *cfg.u_list : kDefaultTheorem1U;
  for (double u : us) {
    if (!(u >= 0.0) || !std::isfinite(u)) throw ConfigurationError("u entries must be finite and >= 0");
  }
  detail::check_nodes(cfg);
  const int n = cfg.nodes.value_or(80);
  std::vector<VerificationRow> rows;
  for (double C : Cs) {
    for (double u : us) {
      VerificationRow r;
      r.u = u;
      r.C = C;
      r.T = T_of_C(C);
      r.nodes = n;
      r.tolerance = cfg.tol.value_or(kTheorem1Tol);
      rows.push_back(r);
    }
  }
  detail::parallel_for(rows.size(), cfg.threads, [&](std::size_t i) {
    auto& r = rows[i];
    try {
      const auto p = ModelParams::from_C(r.C, *r.u);
      r.set_values(airy_side::airy_mult_stat(p, n), kpz_side::kpz_laplace(p, n));
      r.pass = r.abs_diff < r.tolerance;
    } catch (const std::exception& e) {
      detail::fail_row(r, e);
    }
  });
  return rows;
}

// lhs = airy_mult_stat(u = e^{-C a}, C = (T/2)^{1/3}), rhs = F2(a); rows in
// (a, T) order. A row passes if its difference does not exceed the one at
// the previous T; rows at the last T must also be within the tolerance.
inline std::vector<VerificationRow> run_tw_limit(const RunConfig& cfg) {
  const auto Ts = detail::resolve_T(cfg, kDefaultTwT);
  for (std::size_t i = 1; i < Ts.size(); ++i) {
    if (!(Ts[i] > Ts[i - 1])) throw ConfigurationError("T ladder must be increasing");
  }
  const auto& as = cfg.a_list ? *cfg.a_list : kDefaultTwA;
  for (double a : as) {
    if (!(a >= -6.0 && a <= 4.0)) throw ConfigurationError("a entries must lie in [-6, 4]");
  }
  detail::check_nodes(cfg);
  const int n = cfg.nodes.value_or(80);
  std::vector<VerificationRow> rows;
  for (double a : as) {
    for (double T : Ts) {
      VerificationRow r;
      r.a = a;
      r.T = T;
      r.C = C_of_T(T);
      r.u = std::exp(-r.C * a);
      r.nodes = n;
      r.tolerance = cfg.tol.value_or(kTwTol);
      rows.push_back(r);
    }
  }
  detail::parallel_for(rows.size(), cfg.threads, [&](std::size_t i) {
    auto& r = rows[i];
    try {
      const auto p = ModelParams::from_T(r.T, *r.u);
      r.set_values(airy_side::airy_mult_stat(p, n), airy_side::tracy_widom_f2(*r.a, n));
    } catch (const std::exception& e) {
      detail::fail_row(r, e);
    }
  });
  const std::size_t nt = Ts.size();
  for (std::size_t ia = 0; ia < as.size(); ++ia) {
    for (std::size_t it = 0; it < nt; ++it) {
      auto& r = rows[ia * nt + it];
      if (!r.error.empty()) continue;
      bool mono = true;
      if (it > 0) {
        const auto& prev = rows[ia * nt + it - 1];
        mono = prev.error.empty() && r.abs_diff <= prev.abs_diff;
      }
      r.nonincreasing = mono;
      r.pass = mono && (it + 1 < nt || r.abs_diff < r.tolerance);
    }
  }
  return rows;
}

// Monte Carlo estimates against the analytic Airy side. For every C: one
// h-moment row per k in 1..k_max, then one multiplicative-statistic row per u.
inline std::vector<VerificationRow> run_mc_check(const RunConfig& cfg) {
  const auto Cs = detail::resolve_C(cfg, kDefaultMcC);
  const auto& us = cfg.u_list ? *cfg.u_list : kDefaultMcU;
  for (double u : us) {
    if (!(u >= 0.0) || !std::isfinite(u)) throw ConfigurationError("u entries must be finite and >= 0");
  }
  const int k_max = cfg.k_max.value_or(1);
  if (k_max < 0 || k_max > 3) throw ConfigurationError("k-max must be in [0, 3] for mc-check");
  if (cfg.samples < 100) throw ConfigurationError("samples must be >= 100");
  if (cfg.keep_top < montecarlo::kMinKeptForEstimates || cfg.keep_top > montecarlo::kMaxKept) {
    throw ConfigurationError("keep-top must be in [32, 64]");
  }
  if (cfg.matrix_size < montecarlo::kMinMatrixSize || cfg.matrix_size > montecarlo::kMaxMatrixSize ||
      cfg.keep_top > cfg.matrix_size) {
    throw ConfigurationError("matrix-size must be in [50, 5000] and at least keep-top");
  }
  const auto samples = montecarlo::sample_many(cfg.matrix_size, cfg.keep_top,
                                               static_cast<std::size_t>(cfg.samples), cfg.seed,
                                               cfg.threads);
  std::vector<VerificationRow> rows;
  for (double C : Cs) {
    for (int k = 1; k <= k_max; ++k) {
      VerificationRow r;
      r.quantity = "h_moment";
      r.k = k;
      r.C = C;
      r.T = T_of_C(C);
      r.tolerance = cfg.tol.value_or(kMcHTol);
      rows.push_back(r);
    }
    for (double u : us) {
      VerificationRow r;
      r.quantity = "mult_stat";
      r.u = u;
      r.C = C;
      r.T = T_of_C(C);
      r.tolerance = cfg.tol.value_or(kMcMultTol);
      rows.push_back(r);
    }
  }
  detail::parallel_for(rows.size(), cfg.threads, [&](std::size_t i) {
    auto& r = rows[i];
    try {
      montecarlo::EstimatorResult est;
      double analytic = 0.0;
      double allowance = 0.0;
      if (r.k) {
        est = montecarlo::estimate_h_moment(samples, *r.k, r.C);
        analytic = airy_side::airy_h_moment(*r.k, r.C);
        allowance = r.tolerance * std::fabs(analytic);  // relative
      } else {
        est = montecarlo::estimate_mult_stat(samples, *r.u, r.C);
        analytic = airy_side::airy_mult_stat(ModelParams::from_C(r.C, *r.u));
        allowance = r.tolerance;  // absolute
      }
      r.set_values(est.mean, analytic);
      r.std_error = est.std_error;
      r.bias_bound = est.bias_bound;
      r.flagged = est.flagged;
      r.pass = r.abs_diff <= std::max(3.0 * est.std_error, allowance) + est.bias_bound;
    } catch (const std::exception& e) {
      detail::fail_row(r, e);
    }
  });
  return rows;
}

inline std::vector<VerificationRow> run(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::Theorem1: return run_verify_theorem1(cfg);
    case Command::Theorem2: return run_verify_theorem2(cfg);
    case Command::TwLimit: return run_tw_limit(cfg);
    case Command::McCheck: return run_mc_check(cfg);
  }
  return {};
}

inline bool all_pass(const std::vector<VerificationRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const VerificationRow& r) { return r.pass; });
}

}  // namespace kpz::verify
