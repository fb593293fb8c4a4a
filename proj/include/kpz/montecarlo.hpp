#pragma once

// Finite-N stand-in for the Airy point process: the top eigenvalues of the
// tridiagonal beta = 2 ensemble, rescaled at the soft edge, and empirical
// estimators of Airy-side expectations built from them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "kpz/errors.hpp"
#include "kpz/linalg.hpp"

namespace kpz::montecarlo {

inline constexpr int kMinMatrixSize = 50;
inline constexpr int kMaxMatrixSize = 5000;
inline constexpr int kMaxKept = 64;
inline constexpr int kMinKeptForEstimates = 32;
inline constexpr double kBiasGuard = 1e-6;

struct EdgeSample {
  std::vector<double> points;  // a_1 >= a_2 >= ... >= a_m
  int matrix_size = 0;
  int kept = 0;
};

struct EstimatorResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  double bias_bound = 0.0;  // bound on the error from dropping points below a_m
  bool flagged = false;     // bias_bound exceeded the guard
};

// splitmix64 finaliser; used to derive one independent stream per sample.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

// Symmetric tridiagonal matrix with N(0,1) diagonal and off-diagonal entries
// chi_{2(N-j)}/sqrt(2) = sqrt(Gamma(N-j, 1)); its spectrum is that of GUE
// with edge at 2 sqrt(N). Returns the top m eigenvalues rescaled by
// N^{1/6}(lambda - 2 sqrt(N)), in decreasing order.
inline EdgeSample sample_gue_edge(int N, int m, std::uint64_t seed) {
  if (N < kMinMatrixSize || N > kMaxMatrixSize) {
    throw ConfigurationError("sample_gue_edge: N must be in [50, 5000], got " + std::to_string(N));
  }
  if (m < 1 || m > kMaxKept || m > N) {
    throw ConfigurationError("sample_gue_edge: m must be in [1, min(64, N)], got " +
                             std::to_string(m));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> diag(N);
  std::vector<double> off(N - 1);
  for (auto& d : diag) d = normal(rng);
  for (int j = 1; j < N; ++j) {
    std::gamma_distribution<double> gamma(static_cast<double>(N - j), 1.0);
    off[j - 1] = std::sqrt(gamma(rng));
  }
  std::vector<double> ev;
  try {
    ev = linalg::tridiagonal_eigenvalues(std::move(diag), std::move(off));
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + " (seed " + std::to_string(seed) + ")");
  }
  EdgeSample s;
  s.matrix_size = N;
  s.kept = m;
  s.points.reserve(m);
  const double edge = 2.0 * std::sqrt(static_cast<double>(N));
  const double scale = std::pow(static_cast<double>(N), 1.0 / 6.0);
  for (int i = 0; i < m; ++i) s.points.push_back(scale * (ev[N - 1 - i] - edge));
  return s;
}

// Samples 0..count-1, sample i drawn from stream_seed(seed, i). The output
// does not depend on the thread count.
inline std::vector<EdgeSample> sample_many(int N, int m, std::size_t count, std::uint64_t seed,
                                           unsigned threads = 0) {
  std::vector<EdgeSample> out(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = sample_gue_edge(N, m, stream_seed(seed, i));
  };
  if (threads <= 1) {
    work(0, count);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t b = std::min(count, t * chunk);
    const std::size_t e = std::min(count, b + chunk);
    pool.emplace_back([&, t, b, e] {
      try {
        work(b, e);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return out;
}

// h_0..h_k of the variables x from power sums via Newton's identities:
// j h_j = sum_{i=1}^{j} p_i h_{j-i}.
inline std::vector<double> complete_homogeneous(std::span<const double> x, int k) {
  std::vector<double> p(k + 1, 0.0);
  for (double v : x) {
    double pw = 1.0;
    for (int i = 1; i <= k; ++i) {
      pw *= v;
      p[i] += pw;
    }
  }
  std::vector<double> h(k + 1, 0.0);
  h[0] = 1.0;
  for (int j = 1; j <= k; ++j) {
    double s = 0.0;
    for (int i = 1; i <= j; ++i) s += p[i] * h[j - i];
    h[j] = s / j;
  }
  return h;
}

// Estimate of sum_{i>m} e^{C a_i} from the limiting density sqrt(|x|)/pi
// below a_m, plus one extra point at a_m for the gap.
inline double tail_exponential_sum(double a_m, double C) {
  const double r = std::max(std::fabs(a_m), 1.0);
  const double integral = (std::sqrt(r) / C + 1.0 / (2.0 * C * C * std::sqrt(r))) / std::numbers::pi;
  return std::exp(C * a_m) * (1.0 + integral);
}

namespace detail {

inline void check_samples(std::span<const EdgeSample> samples, const char* what) {
  if (samples.size() < 2) {
    throw ConfigurationError(std::string(what) + ": need at least 2 samples");
  }
  const int m = samples.front().kept;
  for (const auto& s : samples) {
    if (s.kept != m || s.points.size() != static_cast<std::size_t>(m)) {
      throw ConfigurationError(std::string(what) + ": samples must share the same m");
    }
  }
  if (m < kMinKeptForEstimates) {
    throw ConfigurationError(std::string(what) + ": m must be >= 32, got " + std::to_string(m));
  }
}

inline void mean_and_stderr(std::span<const double> v, EstimatorResult& r) {
  const double n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  r.mean = sum / n;
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  r.n_samples = v.size();
}

}  // namespace detail

// Empirical E[h_k(e^{C a_1}, ..., e^{C a_m})].
inline EstimatorResult estimate_h_moment(std::span<const EdgeSample> samples, int k, double C) {
  if (k == 0) return {1.0, 0.0, samples.size(), 0.0, false};
  if (k < 0 || k > 3) {
    throw ConfigurationError("estimate_h_moment: k must be in [0, 3], got " + std::to_string(k));
  }
  if (!(C >= 0.3) || !std::isfinite(C)) {
    throw ConfigurationError("estimate_h_moment: C must be >= 0.3, got " + std::to_string(C));
  }
  detail::check_samples(samples, "estimate_h_moment");
  std::vector<double> values;
  values.reserve(samples.size());
  std::vector<double> x;
  double bias = 0.0;
  for (const auto& s : samples) {
    x.clear();
    for (double a : s.points) x.push_back(std::exp(C * a));
    const auto h = complete_homogeneous(x, k);
    values.push_back(h[k]);
    // h_k(x, tail) - h_k(x) = sum_{j>=1} h_{k-j}(x) h_j(tail) <= sum_j h_{k-j}(x) tau^j
    const double tau = tail_exponential_sum(s.points.back(), C);
    double b = 0.0;
    double tp = 1.0;
    for (int j = 1; j <= k; ++j) {
      tp *= tau;
      b += h[k - j] * tp;
    }
    bias += b;
  }
  EstimatorResult r;
  detail::mean_and_stderr(values, r);
  r.bias_bound = bias / static_cast<double>(samples.size());
  r.flagged = r.bias_bound > kBiasGuard * std::max(std::fabs(r.mean), 1.0);
  return r;
}

// Empirical E[prod_{i<=m} 1/(1 + u e^{C a_i})].
inline EstimatorResult estimate_mult_stat(std::span<const EdgeSample> samples, double u, double C) {
  if (!(u >= 0.0) || !std::isfinite(u)) {
    throw ConfigurationError("estimate_mult_stat: u must be finite and >= 0");
  }
  if (!(C > 0.0) || !std::isfinite(C)) {
    throw ConfigurationError("estimate_mult_stat: C must be positive");
  }
  if (u == 0.0) return {1.0, 0.0, samples.size(), 0.0, false};
  detail::check_samples(samples, "estimate_mult_stat");
  std::vector<double> values;
  values.reserve(samples.size());
  double bias = 0.0;
  for (const auto& s : samples) {
    double prod = 1.0;
    for (double a : s.points) prod /= 1.0 + u * std::exp(C * a);
    values.push_back(prod);
    // dropped factors are each >= 1 - u e^{C a_i}, so the product moves by at most u * tail
    bias += std::min(1.0, u * tail_exponential_sum(s.points.back(), C)) * prod;
  }
  EstimatorResult r;
  detail::mean_and_stderr(values, r);
  r.bias_bound = bias / static_cast<double>(samples.size());
  r.flagged = r.bias_bound > kBiasGuard;
  return r;
}

}  // namespace kpz::montecarlo
