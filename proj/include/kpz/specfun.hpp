#pragma once

// Real-argument Airy function Ai, its derivative, and Gamma.
//
// Ai is evaluated piecewise:
//   x <= -9        oscillatory (modulus/phase) asymptotic expansion
//   -9 < x < 9     Taylor expansion of the Airy ODE around tabulated anchors
//   x >= 9         exponentially decaying asymptotic expansion
//
// The anchor table holds (Ai, Ai') on a 0.25-spaced lattice. The negative
// half is produced by Taylor-stepping the ODE from the exact values at 0 (the
// ODE is neutrally stable there); the positive half by stepping downward from
// the asymptotic value at x = 12, which is the stable direction for the
// recessive solution.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "kpz/errors.hpp"

namespace kpz::specfun {

struct AiryPair {
  double x = 0.0;
  double ai = 0.0;
  double ai_prime = 0.0;
};

inline constexpr double kAiryMaxAbsArg = 60.0;

namespace detail {

using real_ext = long double;

// Ai(0) = 3^{-2/3}/Gamma(2/3), Ai'(0) = -3^{-1/3}/Gamma(1/3).
inline constexpr real_ext kAi0 = 0.355028053887817239260063186004183176L;
inline constexpr real_ext kAip0 = -0.258819403792806798405183560189203963L;

inline constexpr real_ext kAnchorStep = 0.25L;
inline constexpr int kAnchorHalf = 36;  // anchors cover [-9, 9]
inline constexpr real_ext kAsymptoticStart = 12.0L;
inline constexpr double kInnerEdge = 9.0;

struct ExtPair {
  real_ext ai;
  real_ext aip;
};

// Advance (Ai, Ai') from x0 by h using the Taylor series of y'' = x y.
inline ExtPair taylor_step(real_ext x0, ExtPair y, real_ext h) {
  // a[n] h^n kept as rolling terms: t_n = a_n h^n.
  real_ext t_nm3 = 0.0L;
  real_ext t_nm2 = y.ai;
  real_ext t_nm1 = y.aip * h;
  real_ext value = t_nm2 + t_nm1;
  real_ext deriv = y.aip;
  const real_ext h2 = h * h;
  const real_ext h3 = h2 * h;
  for (int n = 2; n < 80; ++n) {
    // a_n = (x0 a_{n-2} + a_{n-3}) / (n (n-1))
    const real_ext t_n =
        (x0 * t_nm2 * h2 + t_nm3 * h3) / (static_cast<real_ext>(n) * (n - 1));
    value += t_n;
    if (h != 0.0L) deriv += static_cast<real_ext>(n) * t_n / h;
    const real_ext scale = std::fabs(value) + std::fabs(deriv) * std::fabs(h);
    if (n > 6 && std::fabs(t_n) + std::fabs(t_nm1) <= 1e-22L * scale) break;
    t_nm3 = t_nm2;
    t_nm2 = t_nm1;
    t_nm1 = t_n;
  }
  return {value, deriv};
}

template <typename Real>
struct AsymptoticSums {
  Real even_u, odd_u, even_v, odd_v;  // alternating partial sums in 1/zeta
  Real all_u, all_v;                  // sum (-1)^k u_k / zeta^k
};

// Coefficients u_k, v_k of the Airy asymptotic expansions, summed until the
// terms stop decreasing.
template <typename Real>
AsymptoticSums<Real> asymptotic_sums(Real zeta) {
  AsymptoticSums<Real> s{1, 0, 1, 0, 1, 1};
  Real u = 1;
  Real zpow = 1;
  Real prev = 1e300;
  for (int k = 1; k < 200; ++k) {
    u *= static_cast<Real>((6 * k - 5) * (6 * k - 3) * (6 * k - 1)) /
         (static_cast<Real>(2 * k - 1) * 216 * k);
    const Real v = -static_cast<Real>(6 * k + 1) / (6 * k - 1) * u;
    zpow *= zeta;
    const Real tu = u / zpow;
    const Real tv = v / zpow;
    const Real mag = std::fabs(tu) + std::fabs(tv);
    if (mag >= prev) break;
    prev = mag;
    const Real sign = (k % 2 == 0) ? 1 : -1;
    s.all_u += sign * tu;
    s.all_v += sign * tv;
    // Oscillatory form groups even and odd orders with alternating signs.
    if (k % 2 == 0) {
      const Real s2 = (k % 4 == 0) ? 1 : -1;
      s.even_u += s2 * tu;
      s.even_v += s2 * tv;
    } else {
      const Real s2 = ((k - 1) % 4 == 0) ? 1 : -1;
      s.odd_u += s2 * tu;
      s.odd_v += s2 * tv;
    }
    if (mag < std::numeric_limits<Real>::epsilon() * 1e-3) break;
  }
  return s;
}

template <typename Real>
ExtPair decaying_asymptotic(Real x) {
  const Real zeta = Real(2) / 3 * x * std::sqrt(x);
  const Real q = std::sqrt(std::sqrt(x));
  const Real pre = std::exp(-zeta) / (2 * std::sqrt(std::numbers::pi_v<Real>));
  const auto s = asymptotic_sums(zeta);
  return {pre / q * s.all_u, -pre * q * s.all_v};
}

inline ExtPair oscillatory_asymptotic(double x) {
  const double y = -x;
  const double zeta = 2.0 / 3.0 * y * std::sqrt(y);
  const double q = std::sqrt(std::sqrt(y));
  const auto s = asymptotic_sums(zeta);
  const double phase = zeta + std::numbers::pi / 4;
  const double sn = std::sin(phase);
  const double cs = std::cos(phase);
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  const double ai = inv_sqrt_pi / q * (sn * s.even_u - cs * s.odd_u);
  const double aip = -inv_sqrt_pi * q * (cs * s.even_v + sn * s.odd_v);
  return {ai, aip};
}

struct AnchorTable {
  std::array<ExtPair, 2 * kAnchorHalf + 1> at{};

  AnchorTable() {
    at[kAnchorHalf] = {kAi0, kAip0};
    for (int j = -1; j >= -kAnchorHalf; --j) {
      const real_ext x0 = (j + 1) * kAnchorStep;
      at[kAnchorHalf + j] = taylor_step(x0, at[kAnchorHalf + j + 1], -kAnchorStep);
    }
    // Downward from the asymptotic region.
    const int top = static_cast<int>(kAsymptoticStart / kAnchorStep);
    ExtPair y = decaying_asymptotic(kAsymptoticStart);
    for (int j = top; j > 0; --j) {
      const real_ext x0 = j * kAnchorStep;
      y = taylor_step(x0, y, -kAnchorStep);
      if (j - 1 <= kAnchorHalf && j - 1 >= 1) at[kAnchorHalf + j - 1] = y;
    }
  }
};

inline const AnchorTable& anchors() {
  static const AnchorTable table;
  return table;
}

inline void check_range(double x, const char* name) {
  if (!std::isfinite(x) || std::fabs(x) > kAiryMaxAbsArg) {
    throw DomainError(std::string(name) +
                      ": argument outside supported interval [-60, 60]: " +
                      std::to_string(x));
  }
}

}  // namespace detail

inline AiryPair airy(double x) {
  detail::check_range(x, "airy");
  detail::ExtPair r{};
  if (x >= detail::kInnerEdge) {
    r = detail::decaying_asymptotic(static_cast<detail::real_ext>(x));
  } else if (x <= -detail::kInnerEdge) {
    r = detail::oscillatory_asymptotic(x);
  } else {
    const long double xl = x;
    const int j = static_cast<int>(std::lround(xl / detail::kAnchorStep));
    const long double x0 = j * detail::kAnchorStep;
    r = detail::taylor_step(x0, detail::anchors().at[detail::kAnchorHalf + j],
                            xl - x0);
  }
  return {x, static_cast<double>(r.ai), static_cast<double>(r.aip)};
}

inline double airy_ai(double x) { return airy(x).ai; }

inline double airy_ai_prime(double x) { return airy(x).ai_prime; }

inline double gamma_fn(double x) {
  if (!(x > 0.0)) {
    throw DomainError("gamma_fn: argument must be positive, got " +
                      std::to_string(x));
  }
  return std::tgamma(x);
}

}  // namespace kpz::specfun
