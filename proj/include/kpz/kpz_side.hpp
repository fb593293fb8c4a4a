#pragma once

// The KPZ side: delta Bose gas moment formulas (nested contours and the
// partition expansion on the imaginary axis) and the Fredholm determinant
// for the Laplace transform of Z(T, 0).

#include <algorithm>
#include <array>
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

namespace kpz::kpz_side {

using cplx = std::complex<double>;

inline constexpr double kImagTolerance = 1e-8;
inline constexpr double kSingularThreshold = 1e-12;
inline constexpr int kMaxMomentOrder = 5;
inline constexpr int kMaxNestedOrder = 3;

namespace detail {

// Accepts |Im| up to kImagTolerance relative to |Re|, or up to the rounding
// floor of a sum whose terms have total magnitude `abs_sum`.
inline double real_part_checked(cplx v, const char* what, double abs_sum = 0.0) {
  const double floor = 256.0 * std::numeric_limits<double>::epsilon() * abs_sum;
  if (!(std::fabs(v.imag()) <= kImagTolerance * (std::fabs(v.real()) + 1e-300) + floor)) {
    throw NumericalError(std::string(what) + ": imaginary residue " + std::to_string(v.imag()) +
                         " too large relative to real part " + std::to_string(v.real()));
  }
  return v.real();
}

inline void check_T(double T, const char* what) {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw DomainError(std::string(what) + ": T must be positive, got " + std::to_string(T));
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exponent algebra

// (T/2) (w^2 + (w+1)^2 + ... + (w+part-1)^2), summed term by term.
inline cplx bose_exponent(cplx w, int part, double T) {
  cplx s = 0.0;
  for (int m = 0; m < part; ++m) s += (w + double(m)) * (w + double(m));
  return 0.5 * T * s;
}

// Same quantity as a polynomial in w:
// (T/2) (l w^2 + l(l-1) w + l(l-1)(2l-1)/6).
inline cplx bose_exponent_closed(cplx w, int part, double T) {
  const double l = part;
  return 0.5 * T * (l * w * w + l * (l - 1.0) * w + l * (l - 1.0) * (2.0 * l - 1.0) / 6.0);
}

// ---------------------------------------------------------------------------
// Interaction determinant det[1/(w_j + lambda_j - w_i)]

inline cplx interaction_det(std::span<const cplx> w, const Partition& lambda) {
  const std::size_t n = lambda.length();
  if (w.size() != n) {
    throw ConfigurationError("interaction_det: need one variable per part");
  }
  std::vector<cplx> m(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const cplx d = w[j] + double(lambda.parts[j]) - w[i];
      if (std::abs(d) < kSingularThreshold) {
        throw SingularityError("interaction_det: w_j + lambda_j - w_i vanishes", i, j);
      }
      m[i * n + j] = 1.0 / d;
    }
  }
  return linalg::lu_determinant(std::move(m), n);
}

// ---------------------------------------------------------------------------
// Moments from the partition expansion on the imaginary axis

// Nodes for one axis carrying the phase exp(i (T/2) l (l-1) t). In the
// Hermite variable s = sqrt(T l / 2) t the frequency is
// omega = sqrt(T l / 2) (l - 1); the rule needs roughly omega^2 nodes
// before it resolves the cancellation.
inline int oscillatory_axis_nodes(int base, int part, double T) {
  const double omega = std::sqrt(0.5 * T * part) * (part - 1);
  const int need = static_cast<int>(std::ceil(1.5 * omega * omega + 16.0));
  return std::clamp(std::max(base, need), 1, quad::kMaxHermiteNodes);
}

// Contribution of one partition, without e^{kT/24}:
// (1/prod m_i!) (2 pi)^{-l} int dt det[1/(i t_j + l_j - i t_i)] prod e^{bose(i t_j, l_j, T)}
inline double kpz_partition_term(const Partition& lambda, double T, int nodes_per_axis) {
  const std::size_t n = lambda.length();
  if (n > static_cast<std::size_t>(kMaxMomentOrder)) {
    throw ConfigurationError("kpz_partition_term: at most 5 parts supported");
  }
  std::vector<quad::QuadratureRule> rules;
  std::array<double, kMaxMomentOrder> part{};
  std::array<double, kMaxMomentOrder> freq{};
  double log_const = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const int l = lambda.parts[j];
    part[j] = l;
    // bose(i t) = -(T/2) l t^2 + i (T/2) l (l-1) t + (T/2) l (l-1)(2l-1)/6
    freq[j] = 0.5 * T * l * (l - 1.0);
    log_const += 0.5 * T * l * (l - 1.0) * (2.0 * l - 1.0) / 6.0;
    // Entries 1/(l_j + i(t_j - t_i)) have poles at distance min_m l_m from the
    // real t_j axis, i.e. sqrt(T l / 2) min_m l_m in the rule's natural variable.
    const double d = n > 1 ? std::sqrt(0.5 * T * l) * lambda.parts.back() : INFINITY;
    const int nodes = quad::pole_aware_nodes(oscillatory_axis_nodes(nodes_per_axis, l, T), d,
                                             quad::pole_target(n));
    rules.push_back(quad::gauss_hermite_scaled(nodes, 0.5 * T * l));
  }
  auto integrand = [&](std::span<const double> t) -> cplx {
    std::array<cplx, kMaxMomentOrder * kMaxMomentOrder> m{};
    double phase = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      phase += freq[i] * t[i];
      for (std::size_t j = 0; j < n; ++j) m[i * n + j] = 1.0 / cplx(part[j], t[j] - t[i]);
    }
    return linalg::small_determinant<cplx, kMaxMomentOrder>(m, n) * std::polar(1.0, phase);
  };
  const quad::TensorSum sum = quad::tensor_sum(integrand, std::span<const quad::QuadratureRule>(rules));
  const double pref = std::exp(log_const - static_cast<double>(n) * std::log(2.0 * std::numbers::pi)) /
                      static_cast<double>(symmetry_factor(lambda));
  return pref * detail::real_part_checked(sum.value, "kpz_moment", sum.abs_sum);
}

// E[Z(T,0)^k / k!] e^{kT/24}, summed over partitions of k.
inline double kpz_moment(int k, double T, const TensorNodes& nodes = {}) {
  if (k < 1 || k > kMaxMomentOrder) {
    throw ConfigurationError("kpz_moment: k must be in [1, 5], got " + std::to_string(k));
  }
  detail::check_T(T, "kpz_moment");
  double total = 0.0;
  for (const auto& lambda : partitions(k)) {
    total += kpz_partition_term(lambda, T, nodes.for_dim(lambda.length()));
  }
  return std::exp(k * T / 24.0) * total;
}

inline double kpz_moment(int k, double T, int nodes_per_axis) {
  return kpz_moment(k, T, TensorNodes::uniform(nodes_per_axis));
}

// ---------------------------------------------------------------------------
// Moments from the nested-contour integral

// Vertical contours Re z_j = offsets[j], truncated to |Im z_j| <= half_width.
struct ContourSpec {
  std::vector<double> offsets;
  double half_width = 0.0;

  void validate() const {
    for (std::size_t a = 0; a < offsets.size(); ++a) {
      for (std::size_t b = a + 1; b < offsets.size(); ++b) {
        if (!(offsets[a] - offsets[b] > 1.0)) {
          throw ConfigurationError("ContourSpec: offsets must satisfy a_A - a_B > 1 for A < B");
        }
      }
    }
    if (!(half_width > 0.0)) throw ConfigurationError("ContourSpec: half_width must be positive");
  }
};

// Offsets centred on 0 with spacing 2; half width max|a_j| + 8/sqrt(T).
inline ContourSpec default_contour(int k, double T) {
  ContourSpec spec;
  for (int j = 1; j <= k; ++j) spec.offsets.push_back(2.0 * ((k + 1) / 2.0 - j));
  double amax = 0.0;
  for (double a : spec.offsets) amax = std::max(amax, std::fabs(a));
  spec.half_width = amax + 8.0 / std::sqrt(T);
  return spec;
}

// Direct k-fold quadrature of
//   int prod dz_j/(2 pi i) prod_{A<B} (z_A - z_B)/(z_A - z_B - 1) prod e^{T z_j^2 / 2},
// returned as e^{kT/24}/k! times the integral.
inline double kpz_moment_nested(int k, double T, const ContourSpec& spec, int nodes_per_axis) {
  if (k < 1 || k > kMaxNestedOrder) {
    throw ConfigurationError("kpz_moment_nested: k must be in [1, 3], got " + std::to_string(k));
  }
  detail::check_T(T, "kpz_moment_nested");
  if (spec.offsets.size() != static_cast<std::size_t>(k)) {
    throw ConfigurationError("kpz_moment_nested: need one contour offset per variable");
  }
  spec.validate();
  double amax = 0.0;
  for (double a : spec.offsets) amax = std::max(amax, std::fabs(a));
  // |e^{T z^2/2}| = e^{T (a^2 - t^2)/2} at the truncation edge.
  const double edge = std::exp(0.5 * T * (amax * amax - spec.half_width * spec.half_width));
  if (edge > 1e-13) {
    throw NumericalError("kpz_moment_nested: half_width too small, integrand at the edge is " +
                         std::to_string(edge));
  }
  const auto rule = quad::gauss_legendre_on(-spec.half_width, spec.half_width, nodes_per_axis);
  std::vector<quad::QuadratureRule> rules(k, rule);
  const std::vector<double>& a = spec.offsets;
  auto integrand = [&](std::span<const double> t) -> cplx {
    std::array<cplx, kMaxNestedOrder> z{};
    cplx expo = 0.0;
    for (int j = 0; j < k; ++j) {
      z[j] = cplx(a[j], t[j]);
      expo += 0.5 * T * z[j] * z[j];
    }
    cplx cross = 1.0;
    for (int A = 0; A < k; ++A)
      for (int B = A + 1; B < k; ++B) cross *= (z[A] - z[B]) / (z[A] - z[B] - 1.0);
    return cross * std::exp(expo);
  };
  const quad::TensorSum sum = quad::tensor_sum(integrand, std::span<const quad::QuadratureRule>(rules));
  double kfact = 1.0;
  for (int j = 2; j <= k; ++j) kfact *= j;
  const double pref = std::exp(k * T / 24.0 - k * std::log(2.0 * std::numbers::pi)) / kfact;
  return pref * detail::real_part_checked(sum.value, "kpz_moment_nested", sum.abs_sum);
}

inline double kpz_moment_nested(int k, double T, int nodes_per_axis = 160) {
  return kpz_moment_nested(k, T, default_contour(k, T), nodes_per_axis);
}

// ---------------------------------------------------------------------------
// Laplace transform as a Fredholm determinant on L^2(0, inf)

// Fermi factor 1/(1 + u^{-1} e^{C r}) with C = (T/2)^{1/3}.
inline double fermi_factor(double r, const ModelParams& p) {
  if (p.u == 0.0) return 0.0;
  return 1.0 / (1.0 + std::exp(p.C * r - std::log(p.u)));
}

// Truncation of the outer x-domain [0, x_hi]: K_u(x, x) <= const * u e^{-C x}.
inline double ku_outer_limit(const ModelParams& p) {
  const double log_u = (p.u > 0.0) ? std::log(p.u) : -700.0;
  return std::clamp((log_u + 20.0) / p.C, 4.0, 40.0);
}

// r-range rule for K_u: Ai(x - r) is negligible for r < -14 (x >= 0) and the
// Fermi factor is below e^{-30} for r > (ln u + 30)/C. Unit-length panels
// resolve the oscillations of Ai(x - r) for r > x.
inline quad::QuadratureRule ku_inner_rule(const ModelParams& p, int per_panel = 12) {
  const double log_u = (p.u > 0.0) ? std::log(p.u) : -700.0;
  const double r_lo = -14.0;
  const double r_hi = std::clamp((log_u + 30.0) / p.C, r_lo + 4.0, 50.0);
  const int panels = static_cast<int>(std::ceil(r_hi - r_lo));
  return quad::composite_gauss_legendre(r_lo, r_hi, panels, per_panel);
}

inline quad::QuadratureRule kpz_outer_grid(const ModelParams& p, int n = 80) {
  return quad::gauss_legendre_on(0.0, ku_outer_limit(p), n);
}

namespace detail {

// Rows Ai(x_i - r_m) for all outer nodes; checks that the inner rule
// captures the integrand at both ends.
struct KuFactor {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> ai;      // n x m
  std::vector<double> weight;  // m: w_m * fermi(r_m)
};

inline KuFactor ku_factor(std::span<const double> xs, const ModelParams& p,
                          const quad::QuadratureRule& inner) {
  KuFactor f;
  f.n = xs.size();
  f.m = inner.size();
  f.ai.resize(f.n * f.m);
  f.weight.resize(f.m);
  if (f.m == 0) throw ConfigurationError("ku_kernel: empty inner rule");
  for (std::size_t k = 0; k < f.m; ++k) f.weight[k] = inner.weights[k] * fermi_factor(inner.nodes[k], p);
  const double r_first = inner.nodes.front();
  const double r_last = inner.nodes.back();
  if (fermi_factor(r_last, p) > 1e-10) {
    throw NumericalError("ku_kernel: Fermi factor " + std::to_string(fermi_factor(r_last, p)) +
                         " not negligible at the upper end of the r-range");
  }
  for (std::size_t i = 0; i < f.n; ++i) {
    const double x = xs[i];
    if (x < 0.0) throw DomainError("ku_kernel: x must be >= 0");
    const double lo_arg = x - r_first;
    if (lo_arg < 12.0 && fermi_factor(r_first, p) > 1e-10) {
      throw NumericalError("ku_kernel: r-range starts too late for x = " + std::to_string(x));
    }
    for (std::size_t k = 0; k < f.m; ++k) {
      const double arg = x - inner.nodes[k];
      if (arg > specfun::kAiryMaxAbsArg) {
        f.ai[i * f.m + k] = 0.0;  // Ai below 1e-130
      } else if (arg < -specfun::kAiryMaxAbsArg) {
        throw NumericalError("ku_kernel: r-range extends beyond the Airy domain for x = " +
                             std::to_string(x));
      } else {
        f.ai[i * f.m + k] = specfun::airy_ai(arg);
      }
    }
  }
  return f;
}

inline double ku_entry(const KuFactor& f, std::size_t i, std::size_t j) {
  const double* ri = &f.ai[i * f.m];
  const double* rj = &f.ai[j * f.m];
  double acc = 0.0;
  for (std::size_t k = 0; k < f.m; ++k) acc += f.weight[k] * ri[k] * rj[k];
  return acc;
}

}  // namespace detail

// K_u(x, x') = int dr Ai(x - r) Ai(x' - r) / (1 + u^{-1} e^{C r}).
inline double ku_kernel(double x, double xp, const ModelParams& p,
                        const quad::QuadratureRule& inner_rule) {
  const std::array<double, 2> xs{x, xp};
  const auto f = detail::ku_factor(xs, p, inner_rule);
  return detail::ku_entry(f, 0, 1);
}

// E[exp(-u Z(T,0) e^{T/24})] = det(I - K_u) on L^2(0, inf).
inline double kpz_laplace(const ModelParams& p, const quad::QuadratureRule& outer_rule,
                          const quad::QuadratureRule& inner_rule) {
  if (p.u == 0.0) return 1.0;
  const std::size_t n = outer_rule.size();
  const auto f = detail::ku_factor(outer_rule.nodes, p, inner_rule);
  std::vector<double> sw(n);
  for (std::size_t i = 0; i < n; ++i) sw[i] = std::sqrt(outer_rule.weights[i]);
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = sw[i] * detail::ku_entry(f, i, j) * sw[j];
      m[i * n + j] = v;
      m[j * n + i] = v;
    }
  }
  const double det = quad::det_identity_minus(std::move(m), n);
  if (!(det > 0.0 && det <= 1.0 + 1e-10)) {
    throw NumericalError("kpz_laplace: determinant " + std::to_string(det) + " outside (0, 1]");
  }
  return det;
}

inline double kpz_laplace(const ModelParams& p, int n = 80) {
  return kpz_laplace(p, kpz_outer_grid(p, n), ku_inner_rule(p));
}

}  // namespace kpz::kpz_side
