#pragma once

// Small dense/tridiagonal linear algebra: determinants by partially pivoted
// LU elimination and eigenvalues of symmetric tridiagonal matrices by the
// implicit QL algorithm with Wilkinson shifts.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "kpz/errors.hpp"

namespace kpz::linalg {

// Determinant of the row-major n x n matrix `a` (taken by value, destroyed).
template <typename T>
T lu_determinant(std::vector<T> a, std::size_t n) {
  using std::abs;
  T det = T(1);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    auto best = abs(a[k * n + k]);
    for (std::size_t r = k + 1; r < n; ++r) {
      const auto mag = abs(a[r * n + k]);
      if (mag > best) {
        best = mag;
        piv = r;
      }
    }
    if (best == 0) return T(0);
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[k * n + c], a[piv * n + c]);
      det = -det;
    }
    const T pivot = a[k * n + k];
    det *= pivot;
    for (std::size_t r = k + 1; r < n; ++r) {
      const T factor = a[r * n + k] / pivot;
      if (factor == T(0)) continue;
      for (std::size_t c = k + 1; c < n; ++c) a[r * n + c] -= factor * a[k * n + c];
    }
  }
  return det;
}

// Fixed-size variant for the small determinants evaluated inside integrands;
// avoids heap traffic. `a` is row-major, N <= 8.
template <typename T, std::size_t N>
T small_determinant(std::array<T, N * N> a, std::size_t n) {
  using std::abs;
  T det = T(1);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    auto best = abs(a[k * n + k]);
    for (std::size_t r = k + 1; r < n; ++r) {
      const auto mag = abs(a[r * n + k]);
      if (mag > best) {
        best = mag;
        piv = r;
      }
    }
    if (best == 0) return T(0);
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[k * n + c], a[piv * n + c]);
      det = -det;
    }
    const T pivot = a[k * n + k];
    det *= pivot;
    for (std::size_t r = k + 1; r < n; ++r) {
      const T factor = a[r * n + k] / pivot;
      for (std::size_t c = k + 1; c < n; ++c) a[r * n + c] -= factor * a[k * n + c];
    }
  }
  return det;
}

// Eigenvalues (ascending) of the symmetric tridiagonal matrix with diagonal
// `diag` and sub-diagonal `off` (off.size() == diag.size() - 1).
// Throws NumericalError if some eigenvalue needs more than 60 sweeps.
inline std::vector<double> tridiagonal_eigenvalues(std::vector<double> diag,
                                                   std::vector<double> off) {
  const std::size_t n = diag.size();
  if (n == 0) return {};
  if (off.size() + 1 != n) {
    throw ConfigurationError("tridiagonal_eigenvalues: off-diagonal length must be n-1");
  }
  std::vector<double>& d = diag;
  std::vector<double> e(n, 0.0);
  std::copy(off.begin(), off.end(), e.begin());

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m = l;
    while (true) {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m == l) break;
      if (++iter > 60) {
        throw NumericalError("tridiagonal_eigenvalues: QL iteration did not converge");
      }
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::sqrt(g * g + 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::sqrt(f * f + g * g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace kpz::linalg
