#pragma once

// Quadrature rules, domain maps, tensor-product integration and the Nystrom
// discretization of Fredholm determinants.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "kpz/errors.hpp"
#include "kpz/linalg.hpp"

namespace kpz::quad {

enum class NativeDomain {
  FiniteInterval,    // plain Lebesgue measure on [lo, hi]
  RealLineGaussian,  // weight exp(-gauss_c * x^2) absorbed into the weights
  HalfLine,          // plain Lebesgue measure on [lo, infinity)
  RealLine,          // plain Lebesgue measure on the real line
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  NativeDomain domain = NativeDomain::FiniteInterval;
  double lo = -1.0;
  double hi = 1.0;
  double gauss_c = 1.0;

  std::size_t size() const noexcept { return nodes.size(); }

  // Sum_i w_i f(x_i).
  template <typename F>
  auto integrate(F&& f) const {
    using R = decltype(f(0.0));
    R acc{};
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

struct DomainMap {
  enum class Kind { Identity, Affine, HalfLineExp, RealLineTanh };
  Kind kind = Kind::Identity;
  double a = 0.0;  // Affine: target interval [a, b]
  double b = 0.0;
  double scale = 1.0;

  static DomainMap identity() { return {}; }
  static DomainMap affine(double a, double b) { return {Kind::Affine, a, b, 1.0}; }
  // x = scale * log(2 / (1 - t)) for t in [-1, 1): [-1, 1] -> [0, inf).
  static DomainMap half_line_exp(double scale) { return {Kind::HalfLineExp, 0, 0, scale}; }
  // x = scale * atanh(t): (-1, 1) -> R.
  static DomainMap real_line_tanh(double scale) { return {Kind::RealLineTanh, 0, 0, scale}; }
};

inline constexpr int kMaxLegendreNodes = 512;
inline constexpr int kMaxHermiteNodes = 256;

// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on the
// three-term Legendre recurrence.
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1 || n > kMaxLegendreNodes) {
    throw ConfigurationError("gauss_legendre: node count must be in [1, 512], got " +
                             std::to_string(n));
  }
  QuadratureRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    long double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    long double dp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1.0L;
      long double p1 = 0.0L;
      for (int j = 0; j < n; ++j) {
        const long double p2 = p1;
        p1 = p0;
        p0 = ((2.0L * j + 1.0L) * z * p1 - j * p2) / (j + 1.0L);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0L);
      const long double dz = p0 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-19L) break;
    }
    const double w = static_cast<double>(2.0L / ((1.0L - z * z) * dp * dp));
    rule.nodes[i] = -static_cast<double>(z);
    rule.nodes[n - 1 - i] = static_cast<double>(z);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

// n-point Gauss-Hermite rule for the weight exp(-t^2) on the real line.
// Newton iteration on orthonormal Hermite functions.
inline QuadratureRule gauss_hermite(int n) {
  if (n < 1 || n > kMaxHermiteNodes) {
    throw ConfigurationError("gauss_hermite: node count must be in [1, 256], got " +
                             std::to_string(n));
  }
  const long double pim4 = 0.7511255444649424828587030047762276930510L;  // pi^(-1/4)
  std::vector<long double> roots(n);
  std::vector<long double> wts(n);
  const int half = (n + 1) / 2;
  // Starting values: eigenvalues of the Jacobi matrix, then Newton in long double.
  std::vector<double> jd(n, 0.0), je(n - 1);
  for (int j = 1; j < n; ++j) je[j - 1] = std::sqrt(0.5 * j);
  const std::vector<double> eig = linalg::tridiagonal_eigenvalues(jd, je);
  for (int i = 0; i < half; ++i) {
    long double z = eig[n - 1 - i];
    long double pp = 0.0L;
    for (int it = 0; it < 200; ++it) {
      long double p1 = pim4;
      long double p2 = 0.0L;
      for (int j = 0; j < n; ++j) {
        const long double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0L / (j + 1)) * p2 - std::sqrt(static_cast<long double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0L * n) * p2;
      const long double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) <= 1e-19L * std::max(1.0L, std::fabs(z))) break;
    }
    roots[i] = z;
    wts[i] = 2.0L / (pp * pp);
  }
  QuadratureRule rule;
  rule.domain = NativeDomain::RealLineGaussian;
  rule.gauss_c = 1.0;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  for (int i = 0; i < half; ++i) {
    rule.nodes[i] = -static_cast<double>(roots[i]);
    rule.nodes[n - 1 - i] = static_cast<double>(roots[i]);
    rule.weights[i] = rule.weights[n - 1 - i] = static_cast<double>(wts[i]);
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

// Gauss-Hermite rule for the weight exp(-c x^2): x = t / sqrt(c).
inline QuadratureRule gauss_hermite_scaled(int n, double c) {
  if (!(c > 0.0)) throw ConfigurationError("gauss_hermite_scaled: c must be positive");
  QuadratureRule rule = gauss_hermite(n);
  const double s = 1.0 / std::sqrt(c);
  for (auto& x : rule.nodes) x *= s;
  for (auto& w : rule.weights) w *= s;
  rule.gauss_c = c;
  return rule;
}

// Hermite rules converge like exp(-2 d sqrt(2n)) once the integrand has a pole
// at distance d from the real axis in the rule's natural variable. Smallest n
// (at least `base`) for which that estimate drops below eps.
inline int pole_aware_nodes(int base, double d, double eps) {
  if (!(d > 0.0) || !std::isfinite(d)) return base;
  const double r = std::log(1.0 / eps) / (2.0 * d);
  const double need = std::ceil(0.5 * r * r);
  if (need >= kMaxHermiteNodes) return std::max(base, kMaxHermiteNodes);
  return std::max(base, static_cast<int>(need));
}

// Target for pole_aware_nodes by tensor dimension; looser in high dimension
// where the point count grows fastest.
inline double pole_target(std::size_t dim) {
  if (dim <= 3) return 1e-7;
  if (dim == 4) return 1e-5;
  return 1e-3;
}

inline QuadratureRule map_rule(const QuadratureRule& rule, const DomainMap& map) {
  using Kind = DomainMap::Kind;
  if (map.kind == Kind::Identity) return rule;
  if (rule.domain != NativeDomain::FiniteInterval) {
    throw ConfigurationError("map_rule: only finite-interval rules can be remapped");
  }
  QuadratureRule out;
  out.nodes.resize(rule.size());
  out.weights.resize(rule.size());
  const double width = rule.hi - rule.lo;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double tau = (2.0 * rule.nodes[i] - rule.lo - rule.hi) / width;  // in [-1, 1]
    const double dtau = 2.0 / width;
    double x = 0.0;
    double jac = 0.0;
    switch (map.kind) {
      case Kind::Affine:
        x = map.a + (map.b - map.a) * (tau + 1.0) / 2.0;
        jac = (map.b - map.a) / 2.0;
        break;
      case Kind::HalfLineExp:
        x = map.scale * std::log(2.0 / (1.0 - tau));
        jac = map.scale / (1.0 - tau);
        break;
      case Kind::RealLineTanh:
        x = map.scale * std::atanh(tau);
        jac = map.scale / (1.0 - tau * tau);
        break;
      case Kind::Identity:
        break;
    }
    out.nodes[i] = x;
    out.weights[i] = rule.weights[i] * jac * dtau;
  }
  switch (map.kind) {
    case Kind::Affine:
      if (!(map.b > map.a)) throw ConfigurationError("map_rule: affine map needs a < b");
      out.domain = NativeDomain::FiniteInterval;
      out.lo = map.a;
      out.hi = map.b;
      break;
    case Kind::HalfLineExp:
      if (!(map.scale > 0.0)) throw ConfigurationError("map_rule: scale must be positive");
      out.domain = NativeDomain::HalfLine;
      out.lo = 0.0;
      out.hi = INFINITY;
      break;
    case Kind::RealLineTanh:
      if (!(map.scale > 0.0)) throw ConfigurationError("map_rule: scale must be positive");
      out.domain = NativeDomain::RealLine;
      out.lo = -INFINITY;
      out.hi = INFINITY;
      break;
    case Kind::Identity:
      break;
  }
  return out;
}

// n-point Gauss-Legendre rule on [a, b].
inline QuadratureRule gauss_legendre_on(double a, double b, int n) {
  return map_rule(gauss_legendre(n), DomainMap::affine(a, b));
}

// Composite Gauss-Legendre: `per_panel` nodes on each [breaks[i], breaks[i+1]].
inline QuadratureRule composite_gauss_legendre(std::span<const double> breaks, int per_panel) {
  if (breaks.size() < 2) throw ConfigurationError("composite_gauss_legendre: need >= 2 breakpoints");
  QuadratureRule out;
  out.lo = breaks.front();
  out.hi = breaks.back();
  const QuadratureRule base = gauss_legendre(per_panel);
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const QuadratureRule panel = map_rule(base, DomainMap::affine(breaks[p], breaks[p + 1]));
    out.nodes.insert(out.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    out.weights.insert(out.weights.end(), panel.weights.begin(), panel.weights.end());
  }
  return out;
}

// Equal-width panels on [a, b].
inline QuadratureRule composite_gauss_legendre(double a, double b, int panels, int per_panel) {
  std::vector<double> breaks(panels + 1);
  for (int i = 0; i <= panels; ++i) breaks[i] = a + (b - a) * i / panels;
  breaks.back() = b;
  return composite_gauss_legendre(breaks, per_panel);
}

// ---------------------------------------------------------------------------
// Fredholm determinants

// det(I - M) for the row-major n x n matrix M.
inline double det_identity_minus(std::vector<double> m, std::size_t n) {
  for (std::size_t i = 0; i < n * n; ++i) m[i] = -m[i];
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] += 1.0;
  return linalg::lu_determinant(std::move(m), n);
}

// Nystrom approximation det(I - M), M_ij = sqrt(w_i) K(x_i, x_j) sqrt(w_j).
template <typename Kernel>
double fredholm_det(Kernel&& kernel, const QuadratureRule& rule) {
  const std::size_t n = rule.size();
  std::vector<double> sw(n);
  for (std::size_t i = 0; i < n; ++i) sw[i] = std::sqrt(rule.weights[i]);
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double k = kernel(rule.nodes[i], rule.nodes[j]);
      if (std::isnan(k)) throw EvaluationError("fredholm_det: kernel returned NaN", i, j);
      m[i * n + j] = sw[i] * k * sw[j];
    }
  }
  return det_identity_minus(std::move(m), n);
}

// ---------------------------------------------------------------------------
// Tensor-product integration

inline constexpr std::size_t kMaxTensorDim = 5;
inline constexpr double kMaxTensorPoints = 1e8;

struct TensorSum {
  std::complex<double> value;
  double abs_sum = 0.0;  // sum of |w f|: the scale of the rounding error in value
};

// Sum over the tensor grid of prod_d w_d * f(x). Each outer-axis slice is
// summed lexicographically; slices are then added in index order, so the
// result does not depend on how many threads ran.
template <typename F>
TensorSum tensor_sum(F&& f, std::span<const QuadratureRule> rules, unsigned threads = 0) {
  const std::size_t dim = rules.size();
  if (dim == 0 || dim > kMaxTensorDim) {
    throw ConfigurationError("tensor_integrate: dimension must be in [1, 5], got " +
                             std::to_string(dim));
  }
  double total = 1.0;
  for (const auto& r : rules) total *= static_cast<double>(r.size());
  if (total > kMaxTensorPoints) {
    throw ConfigurationError(
        "tensor_integrate: " + std::to_string(total) +
        " points exceeds the 1e8 budget; reduce the dimension or the nodes per axis");
  }
  const std::size_t outer = rules[0].size();
  std::vector<std::complex<double>> slice(outer);
  std::vector<double> slice_abs(outer);

  auto run_slice = [&](std::size_t i0) {
    std::vector<std::size_t> idx(dim, 0);
    std::vector<double> x(dim);
    idx[0] = i0;
    x[0] = rules[0].nodes[i0];
    std::complex<double> acc{};
    double acc_abs = 0.0;
    if (dim == 1) {
      slice[i0] = rules[0].weights[i0] * std::complex<double>(f(std::span<const double>(x)));
      slice_abs[i0] = std::abs(slice[i0]);
      return;
    }
    for (std::size_t d = 1; d < dim; ++d) x[d] = rules[d].nodes[0];
    while (true) {
      double w = 1.0;
      for (std::size_t d = 1; d < dim; ++d) w *= rules[d].weights[idx[d]];
      const std::complex<double> term = w * std::complex<double>(f(std::span<const double>(x)));
      acc += term;
      acc_abs += std::abs(term);
      std::size_t d = dim - 1;
      while (d >= 1) {
        if (++idx[d] < rules[d].size()) {
          x[d] = rules[d].nodes[idx[d]];
          break;
        }
        idx[d] = 0;
        x[d] = rules[d].nodes[0];
        --d;
      }
      if (d == 0) break;
    }
    slice[i0] = rules[0].weights[i0] * acc;
    slice_abs[i0] = rules[0].weights[i0] * acc_abs;
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, outer));
  if (threads <= 1) {
    for (std::size_t i = 0; i < outer; ++i) run_slice(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < outer; i += threads) run_slice(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  TensorSum out;
  for (std::size_t i = 0; i < outer; ++i) {
    out.value += slice[i];
    out.abs_sum += slice_abs[i];
  }
  return out;
}

template <typename F>
std::complex<double> tensor_integrate(F&& f, std::span<const QuadratureRule> rules,
                                      unsigned threads = 0) {
  return tensor_sum(std::forward<F>(f), rules, threads).value;
}

}  // namespace kpz::quad
