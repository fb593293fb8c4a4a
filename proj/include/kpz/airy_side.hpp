#pragma once

// The Airy point process side: correlation kernel, Laplace transforms of the
// correlation functions, the moment E[h_k], the multiplicative statistic and
// the Tracy-Widom distribution F_2.

#include <algorithm>
#include <array>
#include <initializer_list>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "kpz/errors.hpp"
#include "kpz/linalg.hpp"
#include "kpz/params.hpp"
#include "kpz/partitions.hpp"
#include "kpz/quadrature.hpp"
#include "kpz/specfun.hpp"

namespace kpz::airy_side {

using cplx = std::complex<double>;

inline constexpr double kKernelMaxAbsArg = 50.0;
inline constexpr double kDiagonalEps = 1e-5;
inline constexpr double kImagTolerance = 1e-8;
inline constexpr double kSingularThreshold = 1e-12;
inline constexpr std::size_t kMaxLaplaceDim = 5;

// Laplace exponents c_1, ..., c_n > 0.
class LaplaceArg {
 public:
  explicit LaplaceArg(std::vector<double> c) : c_(std::move(c)) {
    if (c_.empty()) throw DomainError("LaplaceArg: need at least one exponent");
    for (double v : c_) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError("LaplaceArg: exponents must be positive, got " + std::to_string(v));
      }
    }
  }
  LaplaceArg(std::initializer_list<double> c) : LaplaceArg(std::vector<double>(c)) {}

  std::size_t size() const noexcept { return c_.size(); }
  double operator[](std::size_t i) const { return c_[i]; }
  std::span<const double> values() const noexcept { return c_; }

 private:
  std::vector<double> c_;
};

enum class DetMode { Cauchy, Direct };

namespace detail {

// Accepts |Im| up to kImagTolerance relative to |Re|, or up to the rounding
// floor of a sum whose terms have total magnitude `abs_sum`.
inline double real_part_checked(cplx v, const char* what, double abs_sum = 0.0) {
  const double floor = 256.0 * std::numeric_limits<double>::epsilon() * abs_sum;
  if (!(std::fabs(v.imag()) <= kImagTolerance * (std::fabs(v.real()) + 1e-300) + floor)) {
    throw NumericalError(std::string(what) + ": imaginary residue " +
                         std::to_string(v.imag()) + " too large relative to real part " +
                         std::to_string(v.real()));
  }
  return v.real();
}

inline void check_kernel_arg(double x, const char* what) {
  if (!std::isfinite(x) || std::fabs(x) > kKernelMaxAbsArg) {
    throw DomainError(std::string(what) + ": argument outside [-50, 50]: " + std::to_string(x));
  }
}

// Product form of det[1/(a_i + b_j)], no singularity checks.
template <std::size_t N>
cplx cauchy_product(const std::array<cplx, N>& a, const std::array<cplx, N>& b, std::size_t n) {
  cplx num = 1.0;
  cplx den = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    den *= a[i] + b[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      num *= (a[i] - a[j]) * (b[i] - b[j]);
      den *= (a[i] + b[j]) * (a[j] + b[i]);
    }
  }
  return num / den;
}

template <std::size_t N>
cplx cauchy_direct(const std::array<cplx, N>& a, const std::array<cplx, N>& b, std::size_t n) {
  std::array<cplx, N * N> m{};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = 1.0 / (a[i] + b[j]);
  return linalg::small_determinant<cplx, N>(m, n);
}

inline double laplace_prefactor(std::span<const double> c) {
  double cube = 0.0;
  for (double v : c) cube += v * v * v;
  return std::exp(cube / 12.0 - static_cast<double>(c.size()) * std::log(2.0 * std::numbers::pi));
}

// Axis i carries e^{-c_i z_i^2}; the entries 1/((c_i + c_j)/2 + i(z_j - z_i))
// put poles at distance sqrt(c_i) (c_i + c_j)/2 in the rule's natural variable.
inline std::vector<quad::QuadratureRule> hermite_axes(std::span<const double> c, int nodes) {
  std::vector<quad::QuadratureRule> rules;
  rules.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    double d = INFINITY;
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (j != i) d = std::min(d, std::sqrt(c[i]) * 0.5 * (c[i] + c[j]));
    }
    const int n = quad::pole_aware_nodes(nodes, d, quad::pole_target(c.size()));
    rules.push_back(quad::gauss_hermite_scaled(n, c[i]));
  }
  return rules;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Kernel

// K_Airy from precomputed Airy values at x and y.
inline double airy_kernel_from(const specfun::AiryPair& px, const specfun::AiryPair& py) {
  const double d = px.x - py.x;
  if (std::fabs(d) > kDiagonalEps) return (px.ai * py.ai_prime - px.ai_prime * py.ai) / d;
  // Confluent form at the midpoint.
  const double m = 0.5 * (px.x + py.x);
  const specfun::AiryPair pm = (d == 0.0) ? px : specfun::airy(m);
  return pm.ai_prime * pm.ai_prime - m * pm.ai * pm.ai;
}

inline double airy_kernel(double x, double y) {
  detail::check_kernel_arg(x, "airy_kernel");
  detail::check_kernel_arg(y, "airy_kernel");
  return airy_kernel_from(specfun::airy(x), specfun::airy(y));
}

// Rule on [0, 40] for the representation K(x, y) = int_0^inf Ai(x+a) Ai(y+a) da.
inline quad::QuadratureRule kernel_integral_rule() {
  return quad::composite_gauss_legendre(0.0, 40.0, 40, 16);
}

inline double kernel_integral_form(double x, double y, const quad::QuadratureRule& rule) {
  detail::check_kernel_arg(x, "kernel_integral_form");
  detail::check_kernel_arg(y, "kernel_integral_form");
  if (rule.lo != 0.0 || rule.domain == quad::NativeDomain::RealLine ||
      rule.domain == quad::NativeDomain::RealLineGaussian) {
    throw ConfigurationError("kernel_integral_form: rule must start at 0 on the half line");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double a = rule.nodes[i];
    if (x + a > specfun::kAiryMaxAbsArg || y + a > specfun::kAiryMaxAbsArg) continue;
    acc += rule.weights[i] * specfun::airy_ai(x + a) * specfun::airy_ai(y + a);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Okounkov's Laplace identity for products of Airy functions

// int e^{xz} Ai(z+a) Ai(z+b) dz = exp(x^3/12 - (a+b)x/2 - (a-b)^2/(4x)) / (2 sqrt(pi x))
inline double okounkov_integral(double x, double a, double b) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("okounkov_integral: x must be positive, got " + std::to_string(x));
  }
  const double d = a - b;
  return std::exp(x * x * x / 12.0 - 0.5 * (a + b) * x - d * d / (4.0 * x)) /
         (2.0 * std::sqrt(std::numbers::pi * x));
}

// Truncated z-range rule for the direct quadrature of the Okounkov integral.
inline quad::QuadratureRule okounkov_rule(double x, double a, double b) {
  const double lo_shift = std::min(a, b);
  const double hi_shift = std::max(a, b);
  const double z_lo = std::max(-58.0 - lo_shift, -40.0 / x);
  const double z_hi = std::min(58.0 - hi_shift, std::max(14.0, x * x + 10.0) - lo_shift);
  const int panels = static_cast<int>(std::ceil(z_hi - z_lo));
  return quad::composite_gauss_legendre(z_lo, z_hi, panels, 16);
}

inline double okounkov_quadrature(double x, double a, double b, const quad::QuadratureRule& rule) {
  if (!(x > 0.0)) throw DomainError("okounkov_quadrature: x must be positive");
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double z = rule.nodes[i];
    acc += rule.weights[i] * std::exp(x * z) * specfun::airy_ai(z + a) * specfun::airy_ai(z + b);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Cauchy determinant

inline cplx cauchy_det(std::span<const cplx> a, std::span<const cplx> b) {
  const std::size_t n = a.size();
  if (b.size() != n || n == 0) throw ConfigurationError("cauchy_det: a and b must have equal nonzero length");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(a[i] + b[j]) <= kSingularThreshold) {
        throw SingularityError("cauchy_det: a_i + b_j vanishes", i, j);
      }
    }
  }
  cplx num = 1.0;
  cplx den = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    den *= a[i] + b[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      num *= (a[i] - a[j]) * (b[i] - b[j]);
      den *= (a[i] + b[j]) * (a[j] + b[i]);
    }
  }
  return num / den;
}

// det[1/(a_i + b_j)] by elimination; the test-mode counterpart of cauchy_det.
inline cplx cauchy_det_direct(std::span<const cplx> a, std::span<const cplx> b) {
  const std::size_t n = a.size();
  if (b.size() != n || n == 0) throw ConfigurationError("cauchy_det_direct: length mismatch");
  // Cauchy matrices are badly conditioned; eliminate in extended precision.
  using lcplx = std::complex<long double>;
  std::vector<lcplx> m(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const lcplx s = lcplx(a[i]) + lcplx(b[j]);
      if (std::abs(s) <= kSingularThreshold) {
        throw SingularityError("cauchy_det_direct: a_i + b_j vanishes", i, j);
      }
      m[i * n + j] = 1.0L / s;
    }
  }
  const lcplx d = linalg::lu_determinant(std::move(m), n);
  return {static_cast<double>(d.real()), static_cast<double>(d.imag())};
}

// ---------------------------------------------------------------------------
// Laplace transforms of correlation functions

// R(c) = e^{sum c^3/12} / (2 pi)^n  int_{R^n} e^{-sum c_i z_i^2}
//        det[1/((-i z_i + c_i/2) + (i z_j + c_j/2))] dz
inline double laplace_R(const LaplaceArg& arg, int nodes_per_axis, DetMode mode = DetMode::Cauchy) {
  const std::size_t n = arg.size();
  if (n > kMaxLaplaceDim) throw ConfigurationError("laplace_R: at most 5 exponents supported");
  const auto c = arg.values();
  const auto rules = detail::hermite_axes(c, nodes_per_axis);
  std::array<double, kMaxLaplaceDim> half{};
  for (std::size_t i = 0; i < n; ++i) half[i] = 0.5 * c[i];

  auto integrand = [&](std::span<const double> z) -> cplx {
    std::array<cplx, kMaxLaplaceDim> a{};
    std::array<cplx, kMaxLaplaceDim> b{};
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = cplx(half[i], -z[i]);
      b[i] = cplx(half[i], z[i]);
    }
    return mode == DetMode::Cauchy ? detail::cauchy_product(a, b, n)
                                   : detail::cauchy_direct(a, b, n);
  };
  const quad::TensorSum sum = quad::tensor_sum(integrand, std::span<const quad::QuadratureRule>(rules));
  return detail::laplace_prefactor(c) * detail::real_part_checked(sum.value, "laplace_R", sum.abs_sum);
}

// Cyclic integral E(c_1, ..., c_n) with z_{n+1} = z_1.
inline double cycle_E(const LaplaceArg& arg, int nodes_per_axis) {
  const std::size_t n = arg.size();
  if (n > 4) throw ConfigurationError("cycle_E: at most 4 exponents supported");
  const auto c = arg.values();
  const auto rules = detail::hermite_axes(c, nodes_per_axis);
  auto integrand = [&](std::span<const double> z) -> cplx {
    cplx prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      prod *= cplx(0.5 * (c[i] + c[j]), -(z[i] - z[j]));
    }
    return 1.0 / prod;
  };
  const quad::TensorSum sum = quad::tensor_sum(integrand, std::span<const quad::QuadratureRule>(rules));
  return detail::laplace_prefactor(c) * detail::real_part_checked(sum.value, "cycle_E", sum.abs_sum);
}

// E[h_k(e^{C a_1}, e^{C a_2}, ...)] = sum_{lambda |- k} R(C lambda) / prod m_i!
inline double airy_h_moment(int k, double C, const TensorNodes& nodes = {}) {
  if (k < 1 || k > static_cast<int>(kMaxLaplaceDim)) {
    throw ConfigurationError("airy_h_moment: k must be in [1, 5], got " + std::to_string(k));
  }
  if (!(C > 0.0)) throw DomainError("airy_h_moment: C must be positive");
  double total = 0.0;
  for (const auto& lambda : kpz_side::partitions(k)) {
    std::vector<double> c;
    for (int p : lambda.parts) c.push_back(C * p);
    const double r = laplace_R(LaplaceArg(std::move(c)), nodes.for_dim(lambda.length()));
    total += r / static_cast<double>(kpz_side::symmetry_factor(lambda));
  }
  return total;
}

// ---------------------------------------------------------------------------
// Fredholm determinants on the Airy side

// Weight of the multiplicative statistic: 1 - 1/(1 + u e^{C r}).
inline double fermi_weight(double r, double C, double u) {
  if (u == 0.0) return 0.0;
  return 1.0 / (1.0 + std::exp(-C * r - std::log(u)));
}

// Nystrom grid for the multiplicative statistic: the weight is below e^{-20}
// left of r_lo = -(ln u + 20)/C, and K_Airy(r, r) is below 1e-13 right of 8.
// Pushing r_lo further left costs more resolution than it gains in
// truncation error at 80 nodes.
inline quad::QuadratureRule mult_stat_grid(const ModelParams& p, int n = 80) {
  const double r_hi = 8.0;
  const double log_u = (p.u > 0.0) ? std::log(p.u) : -700.0;
  const double r_lo = std::clamp(-(log_u + 20.0) / p.C, -kKernelMaxAbsArg, r_hi - 4.0);
  return quad::gauss_legendre_on(r_lo, r_hi, n);
}

// E[prod_k 1/(1 + u e^{C a_k})] = det(1 - f K_Airy) on L^2(R),
// discretized as det(I - sqrt(f) K sqrt(f)) on `grid`.
inline double airy_mult_stat(const ModelParams& p, const quad::QuadratureRule& grid) {
  if (p.u == 0.0) return 1.0;
  const std::size_t n = grid.size();
  std::vector<specfun::AiryPair> ai(n);
  std::vector<double> sf(n);
  for (std::size_t i = 0; i < n; ++i) {
    detail::check_kernel_arg(grid.nodes[i], "airy_mult_stat");
    ai[i] = specfun::airy(grid.nodes[i]);
    sf[i] = std::sqrt(grid.weights[i] * fermi_weight(grid.nodes[i], p.C, p.u));
  }
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = sf[i] * airy_kernel_from(ai[i], ai[j]) * sf[j];
      m[i * n + j] = v;
      m[j * n + i] = v;
    }
  }
  const double det = quad::det_identity_minus(std::move(m), n);
  if (!(det > 0.0 && det <= 1.0 + 1e-10)) {
    throw NumericalError("airy_mult_stat: determinant " + std::to_string(det) +
                         " outside (0, 1]");
  }
  return det;
}

inline double airy_mult_stat(const ModelParams& p, int n = 80) {
  return airy_mult_stat(p, mult_stat_grid(p, n));
}

// F_2(s) = det(I - K_Airy) on L^2(s, inf); `rule` is a finite-interval rule
// mapped onto [s, max(s, 0) + 14].
inline double tracy_widom_f2(double s, const quad::QuadratureRule& rule) {
  if (!(s >= -10.0 && s <= 6.0)) {
    throw DomainError("tracy_widom_f2: s must lie in [-10, 6], got " + std::to_string(s));
  }
  const quad::QuadratureRule grid =
      quad::map_rule(rule, quad::DomainMap::affine(s, std::max(s, 0.0) + 14.0));
  const std::size_t n = grid.size();
  std::vector<specfun::AiryPair> ai(n);
  std::vector<double> sw(n);
  for (std::size_t i = 0; i < n; ++i) {
    ai[i] = specfun::airy(grid.nodes[i]);
    sw[i] = std::sqrt(grid.weights[i]);
  }
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = sw[i] * airy_kernel_from(ai[i], ai[j]) * sw[j];
  return quad::det_identity_minus(std::move(m), n);
}

inline double tracy_widom_f2(double s, int n = 80) {
  return tracy_widom_f2(s, quad::gauss_legendre(n));
}

// Mean of F_2: E[a_1] = 6 - int_{-10}^{6} F_2(s) ds (both tails are below 1e-9).
inline double tracy_widom_mean(int quad_nodes = 64, int grid_nodes = 80) {
  const auto outer = quad::gauss_legendre_on(-10.0, 6.0, quad_nodes);
  const auto grid = quad::gauss_legendre(grid_nodes);
  double integral = 0.0;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    integral += outer.weights[i] * tracy_widom_f2(outer.nodes[i], grid);
  }
  return 6.0 - integral;
}

}  // namespace kpz::airy_side
