#pragma once

#include <cmath>
#include <string>

#include "kpz/errors.hpp"

namespace kpz {

// Matched parameters of the two sides: KPZ time T, Airy scale C with
// T/2 = C^3, and the Laplace variable u.
struct ModelParams {
  double T = 2.0;
  double C = 1.0;
  double u = 0.0;

  static ModelParams from_T(double T, double u) {
    if (!(T > 0.0) || !std::isfinite(T)) {
      throw DomainError("ModelParams: T must be positive and finite, got " + std::to_string(T));
    }
    check_u(u);
    return {T, std::cbrt(T / 2.0), u};
  }

  static ModelParams from_C(double C, double u) {
    if (!(C > 0.0) || !std::isfinite(C)) {
      throw DomainError("ModelParams: C must be positive and finite, got " + std::to_string(C));
    }
    check_u(u);
    return {2.0 * C * C * C, C, u};
  }

 private:
  static void check_u(double u) {
    if (!(u >= 0.0) || !std::isfinite(u)) {
      throw DomainError("ModelParams: u must be finite and >= 0, got " + std::to_string(u));
    }
  }
};

// Nodes per axis for tensor-product integrals, chosen by dimension.
struct TensorNodes {
  int low_dim = 48;  // dimensions 1..3
  int dim4 = 32;
  int dim5 = 20;

  static TensorNodes uniform(int n) { return {n, n, n}; }

  int for_dim(std::size_t d) const {
    if (d <= 3) return low_dim;
    if (d == 4) return dim4;
    return dim5;
  }
};

}  // namespace kpz
