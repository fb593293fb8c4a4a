#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "kpz/airy_side.hpp"
#include "kpz/errors.hpp"
#include "kpz/montecarlo.hpp"

using namespace kpz;
using namespace kpz::montecarlo;

namespace {

constexpr std::uint64_t kSeed = 20240611;

const std::vector<EdgeSample>& shared_samples() {
  static const std::vector<EdgeSample> s = sample_many(400, 48, 2000, kSeed);
  return s;
}

// h_k by brute force over nondecreasing index tuples.
double h_direct(const std::vector<double>& x, int k, std::size_t start = 0) {
  if (k == 0) return 1.0;
  double s = 0.0;
  for (std::size_t i = start; i < x.size(); ++i) s += x[i] * h_direct(x, k - 1, i);
  return s;
}

}  // namespace

TEST(Sampler, ShapeAndOrdering) {
  const auto s = sample_gue_edge(100, 20, 1);
  EXPECT_EQ(s.matrix_size, 100);
  EXPECT_EQ(s.kept, 20);
  ASSERT_EQ(s.points.size(), 20u);
  for (std::size_t i = 1; i < s.points.size(); ++i) EXPECT_GE(s.points[i - 1], s.points[i]);
}

TEST(Sampler, Deterministic) {
  const auto a = sample_gue_edge(300, 48, 99);
  const auto b = sample_gue_edge(300, 48, 99);
  EXPECT_EQ(a.points, b.points);
  const auto c = sample_gue_edge(300, 48, 100);
  EXPECT_NE(a.points, c.points);
}

TEST(Sampler, ManyIndependentOfThreadCount) {
  const auto a = sample_many(120, 32, 24, 7, 1);
  const auto b = sample_many(120, 32, 24, 7, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].points, b[i].points);
  EXPECT_EQ(a[5].points, sample_gue_edge(120, 32, stream_seed(7, 5)).points);
}

TEST(Sampler, RangeChecked) {
  EXPECT_THROW(sample_gue_edge(49, 10, 1), ConfigurationError);
  EXPECT_THROW(sample_gue_edge(5001, 10, 1), ConfigurationError);
  EXPECT_THROW(sample_gue_edge(100, 0, 1), ConfigurationError);
  EXPECT_THROW(sample_gue_edge(100, 65, 1), ConfigurationError);
}

TEST(Sampler, BulkEdgeSanity) {
  const int N = 400;
  const auto s = sample_many(N, 1, 100, 3);
  double mean_top = 0.0;
  for (const auto& e : s) mean_top += 2.0 * std::sqrt(N) + e.points[0] / std::pow(N, 1.0 / 6.0);
  mean_top /= s.size();
  const double ratio = mean_top / (2.0 * std::sqrt(N));
  EXPECT_GT(ratio, 0.95);
  EXPECT_LT(ratio, 1.05);
}

TEST(Sampler, TopPointMeanMatchesTracyWidom) {
  const auto& s = shared_samples();
  std::vector<double> top;
  for (const auto& e : s) top.push_back(e.points[0]);
  double mean = 0.0;
  for (double v : top) mean += v;
  mean /= top.size();
  double var = 0.0;
  for (double v : top) var += (v - mean) * (v - mean);
  const double se = std::sqrt(var / (top.size() - 1) / top.size());
  EXPECT_LE(std::fabs(mean - airy_side::tracy_widom_mean()), 3.0 * se + 0.05);
}

TEST(Newton, MatchesDirectExpansion) {
  const std::vector<double> x{1.3, 0.2, 0.77, 2.1, 0.05};
  const auto h = complete_homogeneous(x, 4);
  for (int k = 0; k <= 4; ++k) EXPECT_NEAR(h[k], h_direct(x, k), 1e-12 * std::max(1.0, h_direct(x, k))) << k;
}

TEST(Estimators, TrivialCases) {
  const auto& s = shared_samples();
  const auto h0 = estimate_h_moment(s, 0, 0.5);
  EXPECT_EQ(h0.mean, 1.0);
  EXPECT_EQ(h0.std_error, 0.0);
  const auto m0 = estimate_mult_stat(s, 0.0, 0.5);
  EXPECT_EQ(m0.mean, 1.0);
  EXPECT_EQ(m0.std_error, 0.0);
}

TEST(Estimators, PerSampleRanges) {
  const auto& s = shared_samples();
  for (std::size_t i = 0; i < 50; ++i) {
    const std::vector<EdgeSample> one{s[i], s[i + 1]};
    const auto m = estimate_mult_stat(one, 1.0, 0.5);
    EXPECT_GT(m.mean, 0.0);
    EXPECT_LE(m.mean, 1.0);
    EXPECT_GT(estimate_h_moment(one, 2, 0.5).mean, 0.0);
  }
}

TEST(Estimators, HMomentAgainstAnalytic) {
  const auto& s = shared_samples();
  const auto est = estimate_h_moment(s, 1, 0.5);
  const double analytic = airy_side::laplace_R({0.5}, 48);
  EXPECT_NEAR(analytic, std::exp(0.125 / 12.0) / (2.0 * std::sqrt(std::numbers::pi) * std::pow(0.5, 1.5)), 1e-12);
  EXPECT_LE(std::fabs(est.mean - analytic), std::max(3.0 * est.std_error, 0.07 * analytic));
  EXPECT_EQ(est.n_samples, s.size());
  EXPECT_FALSE(est.flagged);
}

TEST(Estimators, MultStatAgainstAnalytic) {
  const auto& s = shared_samples();
  const auto est = estimate_mult_stat(s, 1.0, 0.5);
  const double analytic = airy_side::airy_mult_stat(ModelParams::from_C(0.5, 1.0));
  EXPECT_LE(std::fabs(est.mean - analytic), std::max(3.0 * est.std_error, 0.03));
  EXPECT_FALSE(est.flagged);
  EXPECT_LT(est.bias_bound, 1e-6);
}

TEST(Estimators, BiasGuard) {
  const auto& s = shared_samples();
  for (double C : {0.5, 1.0}) {
    for (double u : {0.1, 1.0, 10.0}) {
      const auto est = estimate_mult_stat(s, u, C);
      EXPECT_LT(est.bias_bound, 1e-6) << C << " " << u;
      EXPECT_FALSE(est.flagged);
    }
  }
  // Small C lets the dropped tail matter; the estimate must say so.
  const auto weak = estimate_mult_stat(s, 1.0, 0.3);
  EXPECT_GT(weak.bias_bound, 1e-6);
  EXPECT_TRUE(weak.flagged);
}

TEST(Estimators, InputChecks) {
  const auto& s = shared_samples();
  EXPECT_THROW(estimate_h_moment(s, 4, 0.5), ConfigurationError);
  EXPECT_THROW(estimate_h_moment(s, 1, 0.2), ConfigurationError);
  EXPECT_THROW(estimate_mult_stat(s, -1.0, 0.5), ConfigurationError);
  const std::vector<EdgeSample> few{sample_gue_edge(100, 20, 1), sample_gue_edge(100, 20, 2)};
  EXPECT_THROW(estimate_mult_stat(few, 1.0, 0.5), ConfigurationError);
  const std::vector<EdgeSample> single{s[0]};
  EXPECT_THROW(estimate_h_moment(single, 1, 0.5), ConfigurationError);
}
