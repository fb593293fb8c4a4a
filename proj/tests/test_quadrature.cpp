#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "kpz/airy_side.hpp"
#include "kpz/errors.hpp"
#include "kpz/linalg.hpp"
#include "kpz/quadrature.hpp"
#include "kpz/specfun.hpp"

using namespace kpz;
using quad::QuadratureRule;

namespace {

void expect_well_formed(const QuadratureRule& r) {
  ASSERT_EQ(r.nodes.size(), r.weights.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_GT(r.weights[i], 0.0) << i;
    if (i) {
      EXPECT_LT(r.nodes[i - 1], r.nodes[i]) << i;
    }
  }
}

double airy_fredholm_at_zero(int n) {
  const auto grid = quad::gauss_legendre_on(0.0, 14.0, n);
  return quad::fredholm_det([](double x, double y) { return airy_side::airy_kernel(x, y); }, grid);
}

}  // namespace

TEST(GaussLegendre, SmallRules) {
  const auto r1 = quad::gauss_legendre(1);
  ASSERT_EQ(r1.size(), 1u);
  EXPECT_EQ(r1.nodes[0], 0.0);
  EXPECT_NEAR(r1.weights[0], 2.0, 1e-15);

  const auto r2 = quad::gauss_legendre(2);
  EXPECT_NEAR(r2.nodes[0], -1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(r2.nodes[1], 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(r2.weights[0], 1.0, 1e-15);
  EXPECT_NEAR(r2.weights[1], 1.0, 1e-15);
}

TEST(GaussLegendre, ExactOnMonomials) {
  const auto r = quad::gauss_legendre(4);
  for (int d = 0; d <= 7; ++d) {
    const double exact = (d % 2) ? 0.0 : 2.0 / (d + 1);
    EXPECT_NEAR(r.integrate([d](double x) { return std::pow(x, d); }), exact, 1e-14) << d;
  }
}

TEST(GaussLegendre, WellFormedAndWeightsSumToTwo) {
  for (int n : {1, 2, 3, 5, 8, 16, 33, 80, 160, 256, 512}) {
    const auto r = quad::gauss_legendre(n);
    expect_well_formed(r);
    double s = 0.0;
    for (double w : r.weights) s += w;
    EXPECT_NEAR(s, 2.0, 1e-13) << n;
    // symmetric about 0
    for (int i = 0; i < n; ++i) EXPECT_NEAR(r.nodes[i], -r.nodes[n - 1 - i], 1e-15) << n;
  }
}

TEST(GaussLegendre, NodesAreLegendreRoots) {
  const int n = 40;
  const auto r = quad::gauss_legendre(n);
  for (double x : r.nodes) EXPECT_NEAR(std::legendre(n, x), 0.0, 1e-13);
}

TEST(GaussLegendre, RangeChecked) {
  EXPECT_THROW(quad::gauss_legendre(0), ConfigurationError);
  EXPECT_THROW(quad::gauss_legendre(513), ConfigurationError);
}

TEST(GaussHermite, SmallRules) {
  const auto r1 = quad::gauss_hermite(1);
  EXPECT_EQ(r1.nodes[0], 0.0);
  EXPECT_NEAR(r1.weights[0], std::sqrt(std::numbers::pi), 1e-15);
  const auto r2 = quad::gauss_hermite(2);
  EXPECT_NEAR(r2.integrate([](double t) { return t * t; }), std::sqrt(std::numbers::pi) / 2.0, 1e-14);
  const auto r8 = quad::gauss_hermite(8);
  EXPECT_NEAR(r8.integrate([](double) { return 1.0; }), std::sqrt(std::numbers::pi), 1e-14);
  EXPECT_EQ(r8.domain, quad::NativeDomain::RealLineGaussian);
}

TEST(GaussHermite, MomentsAndWellFormed) {
  for (int n : {3, 10, 48, 96, 128, 256}) {
    const auto r = quad::gauss_hermite(n);
    expect_well_formed(r);
    // int t^{2m} e^{-t^2} = Gamma(m + 1/2), exact while 2m <= 2n - 1
    for (int m = 0; 2 * m <= std::min(2 * n - 1, 20); ++m) {
      const double exact = std::tgamma(m + 0.5);
      EXPECT_NEAR(r.integrate([m](double t) { return std::pow(t, 2 * m); }), exact, 1e-12 * exact)
          << n << " " << m;
    }
  }
  EXPECT_THROW(quad::gauss_hermite(0), ConfigurationError);
  EXPECT_THROW(quad::gauss_hermite(257), ConfigurationError);
}

TEST(GaussHermite, ScaledRuleAbsorbsWeight) {
  const double c = 2.7;
  const auto r = quad::gauss_hermite_scaled(32, c);
  EXPECT_NEAR(r.integrate([](double) { return 1.0; }), std::sqrt(std::numbers::pi / c), 1e-14);
  // int cos(x) e^{-c x^2} = sqrt(pi/c) e^{-1/(4c)}
  EXPECT_NEAR(r.integrate([](double x) { return std::cos(x); }),
              std::sqrt(std::numbers::pi / c) * std::exp(-0.25 / c), 1e-14);
  EXPECT_THROW(quad::gauss_hermite_scaled(8, 0.0), ConfigurationError);
}

TEST(MapRule, IdentityAndAffine) {
  const auto r = quad::gauss_legendre(7);
  const auto same = quad::map_rule(r, quad::DomainMap::identity());
  EXPECT_EQ(same.nodes, r.nodes);
  EXPECT_EQ(same.weights, r.weights);

  const auto one = quad::map_rule(quad::gauss_legendre(1), quad::DomainMap::affine(0.0, 2.0));
  EXPECT_NEAR(one.nodes[0], 1.0, 1e-15);
  EXPECT_NEAR(one.weights[0], 2.0, 1e-15);
}

TEST(MapRule, HalfLineExp) {
  const auto r = quad::map_rule(quad::gauss_legendre(40), quad::DomainMap::half_line_exp(1.0));
  expect_well_formed(r);
  EXPECT_EQ(r.domain, quad::NativeDomain::HalfLine);
  EXPECT_NEAR(r.integrate([](double s) { return std::exp(-s); }), 1.0, 1e-10);
}

TEST(MapRule, RealLineTanh) {
  const auto r = quad::map_rule(quad::gauss_legendre(120), quad::DomainMap::real_line_tanh(2.0));
  expect_well_formed(r);
  EXPECT_NEAR(r.integrate([](double x) { return 1.0 / std::cosh(x); }), std::numbers::pi, 1e-8);
}

TEST(MapRule, IncompatibleDomainRejected) {
  const auto h = quad::gauss_hermite(8);
  EXPECT_THROW(quad::map_rule(h, quad::DomainMap::affine(0, 1)), ConfigurationError);
  EXPECT_THROW(quad::map_rule(quad::gauss_legendre(4), quad::DomainMap::affine(1, 0)), ConfigurationError);
  EXPECT_THROW(quad::map_rule(quad::gauss_legendre(4), quad::DomainMap::half_line_exp(-1)), ConfigurationError);
}

TEST(CompositeRule, IntegratesOscillatoryFunction) {
  const auto r = quad::composite_gauss_legendre(0.0, 20.0, 20, 12);
  expect_well_formed(r);
  EXPECT_NEAR(r.integrate([](double x) { return std::sin(3 * x); }), (1.0 - std::cos(60.0)) / 3.0, 1e-13);
  const std::vector<double> breaks{0.0, 0.5, 3.0};
  const auto r2 = quad::composite_gauss_legendre(breaks, 6);
  EXPECT_EQ(r2.size(), 12u);
  EXPECT_NEAR(r2.integrate([](double x) { return x * x; }), 9.0, 1e-13);
}

TEST(FredholmDet, ZeroKernelIsExactlyOne) {
  const auto grid = quad::gauss_legendre_on(-3.0, 5.0, 30);
  EXPECT_EQ(quad::fredholm_det([](double, double) { return 0.0; }, grid), 1.0);
  EXPECT_EQ(quad::fredholm_det([](double x, double y) { return 0.0 * airy_side::airy_kernel(x, y); }, grid), 1.0);
}

TEST(FredholmDet, RankOne) {
  const auto grid = quad::gauss_legendre_on(0.0, 2.0, 20);
  auto phi = [](double x) { return 0.5 * std::exp(-x); };
  const double norm = grid.integrate([&](double x) { return phi(x) * phi(x); });
  EXPECT_NEAR(quad::fredholm_det([&](double x, double y) { return phi(x) * phi(y); }, grid), 1.0 - norm, 1e-14);
}

TEST(FredholmDet, AiryKernelSelfConvergence) {
  const double d80 = airy_fredholm_at_zero(80);
  const double d160 = airy_fredholm_at_zero(160);
  EXPECT_NEAR(d80, d160, 1e-10);
  EXPECT_NEAR(d80, 0.969372828355, 1e-10);
}

TEST(FredholmDet, TransposedKernel) {
  const auto grid = quad::gauss_legendre_on(-2.0, 6.0, 40);
  auto k = [](double x, double y) { return airy_side::airy_kernel(x, y); };
  auto kt = [](double x, double y) { return airy_side::airy_kernel(y, x); };
  EXPECT_NEAR(quad::fredholm_det(k, grid), quad::fredholm_det(kt, grid), 1e-13);
}

TEST(FredholmDet, NanReportsNodePair) {
  const auto grid = quad::gauss_legendre_on(0.0, 1.0, 5);
  try {
    quad::fredholm_det([&](double x, double y) { return (x == grid.nodes[2] && y == grid.nodes[3]) ? NAN : 0.1; }, grid);
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.col(), 3u);
  }
}

TEST(TensorIntegrate, Examples) {
  const auto l2 = quad::gauss_legendre(2);
  const std::array<QuadratureRule, 2> sq{l2, l2};
  EXPECT_NEAR(quad::tensor_integrate([](std::span<const double>) { return 1.0; }, sq).real(), 4.0, 1e-15);

  const auto h = quad::gauss_hermite(20);
  const std::array<QuadratureRule, 2> hh{h, h};
  EXPECT_NEAR(quad::tensor_integrate([](std::span<const double>) { return 1.0; }, hh).real(), std::numbers::pi, 1e-12);

  // degree 3 per axis, exact with 2 nodes
  const std::array<QuadratureRule, 3> cube{l2, l2, l2};
  auto poly = [](std::span<const double> x) {
    return (1 + x[0] + x[0] * x[0] * x[0]) * (2 - x[1] * x[1]) * (x[2] * x[2] + 3 * x[2] * x[2] * x[2]);
  };
  // int (1 + x + x^3) = 2, int (2 - y^2) = 10/3, int (z^2 + 3 z^3) = 2/3
  EXPECT_NEAR(quad::tensor_integrate(poly, cube).real(), 2.0 * (10.0 / 3.0) * (2.0 / 3.0), 1e-14);
}

TEST(TensorIntegrate, ComplexIntegrandAndAbsSum) {
  const auto r = quad::gauss_hermite(40);
  const std::array<QuadratureRule, 1> one{r};
  // int e^{i t} e^{-t^2} dt = sqrt(pi) e^{-1/4}
  const auto s = quad::tensor_sum([](std::span<const double> t) { return std::polar(1.0, t[0]); }, one);
  EXPECT_NEAR(s.value.real(), std::sqrt(std::numbers::pi) * std::exp(-0.25), 1e-14);
  EXPECT_NEAR(s.value.imag(), 0.0, 1e-15);
  EXPECT_NEAR(s.abs_sum, std::sqrt(std::numbers::pi), 1e-13);
}

TEST(TensorIntegrate, DeterministicAcrossThreadCounts) {
  const auto r = quad::gauss_legendre(17);
  const std::array<QuadratureRule, 3> rules{r, r, r};
  auto f = [](std::span<const double> x) {
    return std::complex<double>(std::sin(x[0] + 2 * x[1]) * x[2], std::cos(x[0] * x[1] * x[2]));
  };
  const auto a = quad::tensor_integrate(f, rules, 1);
  for (unsigned t : {2u, 3u, 8u}) EXPECT_EQ(quad::tensor_integrate(f, rules, t), a);
}

TEST(TensorIntegrate, BudgetAndDimensionChecks) {
  const auto big = quad::gauss_legendre(512);
  const std::array<QuadratureRule, 3> rules{big, big, big};
  EXPECT_THROW(quad::tensor_integrate([](std::span<const double>) { return 1.0; }, rules), ConfigurationError);
  const std::vector<QuadratureRule> six(6, quad::gauss_legendre(2));
  EXPECT_THROW(quad::tensor_integrate([](std::span<const double>) { return 1.0; }, six), ConfigurationError);
  const std::vector<QuadratureRule> none;
  EXPECT_THROW(quad::tensor_integrate([](std::span<const double>) { return 1.0; }, none), ConfigurationError);
}

TEST(TensorIntegrate, WorkerExceptionsPropagate) {
  const auto r = quad::gauss_legendre(9);
  const std::array<QuadratureRule, 2> rules{r, r};
  auto f = [](std::span<const double> x) -> double {
    if (x[0] > 0.5) throw std::runtime_error("boom");
    return 1.0;
  };
  EXPECT_THROW(quad::tensor_integrate(f, rules, 4), std::runtime_error);
}

TEST(Linalg, LuDeterminant) {
  std::vector<double> m{4, 3, 6, 3};
  EXPECT_NEAR(linalg::lu_determinant(m, 2), -6.0, 1e-14);
  // needs pivoting
  std::vector<double> p{0, 1, 1, 0};
  EXPECT_NEAR(linalg::lu_determinant(p, 2), -1.0, 1e-15);
  std::vector<std::complex<double>> c{{1, 1}, {2, 0}, {0, 1}, {1, -1}};
  const auto d = linalg::lu_determinant(c, 2);
  EXPECT_NEAR(std::abs(d - std::complex<double>(2, -2)), 0.0, 1e-14);
}

TEST(Linalg, SmallDeterminantMatchesLu) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t n = 1; n <= 5; ++n) {
    std::array<std::complex<double>, 25> a{};
    std::vector<std::complex<double>> v(n * n);
    for (std::size_t i = 0; i < n * n; ++i) a[i] = v[i] = {u(rng), u(rng)};
    const auto d1 = linalg::small_determinant<std::complex<double>, 5>(a, n);
    const auto d2 = linalg::lu_determinant(v, n);
    EXPECT_LT(std::abs(d1 - d2), 1e-13 * std::max(1.0, std::abs(d2))) << n;
  }
}

TEST(Linalg, TridiagonalEigenvalues) {
  // tridiag(-1, 2, -1): eigenvalues 2 - 2 cos(k pi / (n + 1))
  const std::size_t n = 50;
  std::vector<double> d(n, 2.0), e(n - 1, -1.0);
  const auto ev = linalg::tridiagonal_eigenvalues(d, e);
  ASSERT_EQ(ev.size(), n);
  for (std::size_t k = 1; k <= n; ++k) {
    EXPECT_NEAR(ev[k - 1], 2.0 - 2.0 * std::cos(k * std::numbers::pi / (n + 1)), 1e-13);
  }
  EXPECT_THROW(linalg::tridiagonal_eigenvalues({1.0, 2.0}, {1.0, 1.0}), ConfigurationError);
  EXPECT_TRUE(linalg::tridiagonal_eigenvalues({}, {}).empty());
}
