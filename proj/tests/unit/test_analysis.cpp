#include <gtest/gtest.h>

#include <cmath>

#include "msfbm/analysis.hpp"
#include "msfbm/errors.hpp"
#include "msfbm/kernels.hpp"
#include "msfbm/sampler.hpp"
#include "oracle_values.hpp"

using namespace msfbm;
using namespace msfbm::analysis;

namespace {

ProcessSpec one(double a, double h) { return ProcessSpec({a}, {h}); }

SamplePath linear_path(std::size_t n_points) {
  const auto grid = TimeGrid::uniform(n_points, 1.0);
  return SamplePath(grid, std::vector<double>(grid.times().begin(), grid.times().end()));
}

SamplePath constant_path(std::size_t n_points) {
  return SamplePath(TimeGrid::uniform(n_points, 1.0), std::vector<double>(n_points, 0.0));
}

std::vector<SamplePath> paths(const ProcessSpec& spec, std::size_t n_points, std::size_t reps, std::uint64_t seed) {
  return sample_ensemble(spec, TimeGrid::uniform(n_points, 1.0), reps, seed).paths;
}

}  // namespace

TEST(FitLine, ExactLine) {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.slope_stderr, 0.0, 1e-14);
  EXPECT_THROW(fit_line(std::vector<double>{1}, std::vector<double>{1}), ValidationError);
  EXPECT_THROW(fit_loglog(std::vector<double>{1, 2}, std::vector<double>{0, 1}), ValidationError);
}

TEST(Median, OddAndEven) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_THROW(median({}), ValidationError);
}

TEST(EmpiricalCov, ZeroColumnConvention) {
  const auto ens = sample_ensemble(one(1, 0.5), TimeGrid::uniform(4, 1.0), 10, 1);
  const auto e = empirical_cov(ens, 0, 2);
  EXPECT_EQ(e.estimate, 0.0);
  EXPECT_EQ(e.zscore, 0.0);
}

TEST(EmpiricalCov, BrownianAndOracle) {
  const auto bm = sample_ensemble(one(1, 0.5), TimeGrid({0, 1, 2}), 10000, 2);
  const auto e1 = empirical_cov(bm, 1, 2);
  EXPECT_LT(std::abs(e1.estimate - 1.0), 4 * e1.stderr);
  const auto sf = sample_ensemble(one(1, 0.75), TimeGrid({0, 1, 2}), 10000, 3);
  const auto e2 = empirical_cov(sf, 1, 2);
  EXPECT_LT(std::abs(e2.estimate - oracle::kSfbmCovH075At1And2), 4 * e2.stderr);
  EXPECT_NEAR(e2.zscore, (e2.estimate - oracle::kSfbmCovH075At1And2) / e2.stderr, 1e-9);
}

TEST(EmpiricalCov, Errors) {
  const auto ens = sample_ensemble(one(1, 0.5), TimeGrid::uniform(4, 1.0), 1, 1);
  EXPECT_THROW(empirical_cov(ens, 1, 2), InsufficientReplicas);
  const auto two = sample_ensemble(one(1, 0.5), TimeGrid::uniform(4, 1.0), 2, 1);
  EXPECT_THROW(empirical_cov(two, 1, 4), ValidationError);
}

TEST(PVariation, Examples) {
  EXPECT_EQ(p_variation_stat(constant_path(9), 2.0, 4), 0.0);
  EXPECT_EQ(p_variation_stat(constant_path(9), 0.7, 8), 0.0);
  const SamplePath tent(TimeGrid({0, 0.5, 1}), {0, 1, 0});
  EXPECT_EQ(p_variation_stat(tent, 2.0, 2), 2.0);
  EXPECT_EQ(p_variation_stat(tent, 1.0, 2), 2.0);
  EXPECT_EQ(p_variation_stat(tent, 2.0, 1), 0.0);
}

TEST(PVariation, MatchesNaiveLoopExactly) {
  const auto ps = paths(ProcessSpec({1, 2}, {0.3, 0.7}), 65, 5, 4);
  for (const auto& p : ps) {
    for (std::size_t n : {1u, 2u, 4u, 8u, 16u, 32u, 64u}) {
      double naive = 0.0;
      const std::size_t stride = 64 / n;
      for (std::size_t j = 1; j <= n; ++j) {
        const double d = p.values[j * stride] - p.values[(j - 1) * stride];
        naive += d * d;
      }
      EXPECT_EQ(p_variation_stat(p, 2.0, n), naive);
    }
  }
}

TEST(PVariation, NonUniformGridAndMismatch) {
  const SamplePath p(TimeGrid({0, 0.25, 0.3, 0.5, 0.75, 1.0}), {0, 1, 5, 2, 2, 0});
  EXPECT_EQ(p_variation_stat(p, 2.0, 4), 1.0 + 1.0 + 0.0 + 4.0);
  EXPECT_THROW(p_variation_stat(p, 2.0, 3), GridMismatch);
  EXPECT_THROW(p_variation_stat(p, 0.0, 2), ValidationError);
}

TEST(QvScaling, BrownianLevel) {
  const std::vector<int> levels{6, 7, 8, 9, 10};
  const auto rep = qv_scaling_exponent(one(2, 0.5), levels, 200, 5);
  ASSERT_EQ(rep.partition_sizes.size(), levels.size());
  EXPECT_EQ(rep.partition_sizes.front(), 64u);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    EXPECT_LT(std::abs(rep.statistics[i] - 4.0), 4 * rep.statistic_stderrs[i]) << i;
  }
  EXPECT_LT(std::abs(rep.fitted_log_slope), 0.05);
}

TEST(QvScaling, DivergentAndVanishing) {
  const std::vector<int> levels{6, 7, 8, 9, 10};
  EXPECT_NEAR(qv_scaling_exponent(one(1, 0.3), levels, 50, 6).fitted_log_slope, 0.4, 0.1);
  EXPECT_NEAR(qv_scaling_exponent(one(1, 0.8), levels, 50, 7).fitted_log_slope, -0.6, 0.1);
  EXPECT_THROW(qv_scaling_exponent(one(1, 0.8), std::vector<int>{5, 5}, 2, 7), ValidationError);
}

TEST(Holder, Examples) {
  EXPECT_NEAR(holder_exponent_estimate(paths(one(1, 0.5), 1025, 100, 8)).h_hat, 0.5, 0.05);
  EXPECT_NEAR(holder_exponent_estimate(paths(ProcessSpec({1, 1}, {0.3, 0.8}), 1025, 100, 9)).h_hat, 0.3, 0.05);
  EXPECT_NEAR(holder_exponent_estimate(paths(ProcessSpec({1, 0}, {0.3, 0.1}), 1025, 100, 10)).h_hat, 0.3, 0.05);
}

TEST(Holder, InvariantUnderCommonScaling) {
  const auto a = holder_exponent_estimate(paths(ProcessSpec({1, 2}, {0.4, 0.7}), 257, 100, 11));
  const auto b = holder_exponent_estimate(paths(ProcessSpec({3, 6}, {0.4, 0.7}), 257, 100, 11));
  EXPECT_LE(std::abs(a.h_hat - b.h_hat), std::max(a.stderr, 1e-12));
}

TEST(Holder, Preconditions) {
  EXPECT_THROW(holder_exponent_estimate(paths(one(1, 0.5), 128, 100, 1)), InsufficientResolution);
  EXPECT_THROW(holder_exponent_estimate(paths(one(1, 0.5), 257, 50, 1)), InsufficientReplicas);
}

TEST(GraphDimension, StraightLine) {
  const auto d = graph_box_dimension(linear_path((1u << 14) + 1));
  EXPECT_NEAR(d.value, 1.0, 0.1);
  EXPECT_EQ(d.method, DimensionMethod::GraphBoxCount);
  EXPECT_LT(d.scale_range.first, d.scale_range.second);
  EXPECT_THROW(graph_box_dimension(linear_path(1000)), InsufficientResolution);
}

TEST(GraphDimension, BrownianAndMixed) {
  const auto bm = paths(one(1, 0.5), (1u << 16) + 1, 1, 12).front();
  EXPECT_NEAR(graph_box_dimension(bm).value, 1.5, 0.15);
  const auto mixed = paths(ProcessSpec({1, 1}, {0.3, 0.8}), (1u << 16) + 1, 1, 13).front();
  const auto d = graph_box_dimension(mixed);
  EXPECT_NEAR(d.value, 1.7, 0.15);
  EXPECT_GE(d.value, 0.9);
  EXPECT_LE(d.value, 2.0);
  EXPECT_GT(d.stderr, 0.0);
}

TEST(LevelSetDimension, MonotonePathSingleCrossing) {
  const auto d = level_set_box_dimension(linear_path(4097), 0.5, 0.01);
  EXPECT_NEAR(d.value, 0.0, 1e-12);
  EXPECT_EQ(d.method, DimensionMethod::LevelSetBoxCount);
  EXPECT_THROW(level_set_box_dimension(linear_path(4097), 2.0, 0.01), LevelNotCrossed);
}

TEST(LevelSetDimension, BrownianZeroSetMedian) {
  const auto ps = paths(one(1, 0.5), (1u << 16) + 1, 20, 14);
  std::vector<double> values;
  for (const auto& p : ps) {
    try {
      values.push_back(level_set_box_dimension(p, 0.0, 0.01).value);
    } catch (const LevelNotCrossed&) {
    }
  }
  ASSERT_GE(values.size(), 10u);
  EXPECT_NEAR(median(values), 0.5, 0.15);
}

TEST(RangeDimension, Examples) {
  EXPECT_EQ(range_dimension(constant_path(2048)).value, 0.0);
  for (double h : {0.7, 0.3}) {
    const auto p = paths(one(1, h), (1u << 14) + 1, 1, 15).front();
    const auto d = range_dimension(p);
    EXPECT_NEAR(d.value, 1.0, 0.1) << h;
    EXPECT_EQ(d.method, DimensionMethod::RangeBoxCount);
  }
}

TEST(NondiffProbe, LinearPathIsFlat) {
  const SamplePath p = linear_path(1025);
  const auto probe = nondiff_probe(std::span<const SamplePath>(&p, 1), 0.5);
  EXPECT_GE(probe.rows.size(), 4u);
  EXPECT_NEAR(probe.slope, 0.0, 1e-9);
  for (const auto& r : probe.rows) EXPECT_NEAR(r.mean_max_quotient, 1.0, 1e-9);
}

TEST(NondiffProbe, RoughPaths) {
  for (double h : {0.5, 0.8}) {
    const auto ps = paths(one(1, h), 4097, 200, 16);
    const auto probe = nondiff_probe(ps, 0.5);
    EXPECT_NEAR(probe.slope, h - 1.0, 0.15) << h;
    for (std::size_t i = 1; i < probe.rows.size(); ++i) {
      EXPECT_LT(probe.rows[i].eps, probe.rows[i - 1].eps);
      EXPECT_GT(probe.rows[i].mean_max_quotient, probe.rows[i - 1].mean_max_quotient);
    }
  }
}

TEST(NondiffProbe, Preconditions) {
  const SamplePath p = linear_path(17);
  EXPECT_THROW(nondiff_probe(std::span<const SamplePath>(&p, 1), 0.5), InsufficientResolution);
  const SamplePath q = linear_path(1025);
  EXPECT_THROW(nondiff_probe(std::span<const SamplePath>(&q, 1), 0.0), ValidationError);
  EXPECT_THROW(nondiff_probe(std::span<const SamplePath>(&q, 1), 0.3333), GridMismatch);
}

TEST(SrdPartialSums, Examples) {
  for (double s : srd_partial_sums(one(1, 0.5), 0, 100)) EXPECT_EQ(s, 0.0);
  const auto sums = srd_partial_sums(one(1, 0.75), 0, 20);
  ASSERT_EQ(sums.size(), 20u);
  EXPECT_DOUBLE_EQ(sums[0], kernels::lag_cov_c_closed_form(one(1, 0.75), 0, 1));
  EXPECT_NEAR(lag_cov_tail_slope(one(1, 0.75), 0, 1000, 100000).slope, -1.5, 0.1);
  EXPECT_NEAR(lag_cov_tail_slope(one(1, 0.9), 0, 1000, 100000).slope, -1.2, 0.1);
  EXPECT_THROW(srd_partial_sums(one(1, 0.75), 0, 5), ValidationError);
}

TEST(SrdPartialSums, DecadeIncrementsContract) {
  for (double h : {0.6, 0.75, 0.9}) {
    const auto s = srd_partial_sums(one(1, h), 0, 100000);
    const double d1 = std::abs(s[9999] - s[999]), d2 = std::abs(s[99999] - s[9999]);
    EXPECT_NEAR(std::log10(d2 / d1), 2 * h - 2, 0.1) << h;
  }
}

TEST(StationarityGap, SlopeAndMonotoneDecay) {
  const auto spec = one(1, 0.75);
  EXPECT_NEAR(stationarity_gap_slope(spec, 1, 1e3, 1e5).slope, -0.5, 0.1);
  double prev = std::abs(kernels::stationarity_gap(spec, 1e3, 1));
  for (int k = 1; k <= 20; ++k) {
    const double g = std::abs(kernels::stationarity_gap(spec, std::pow(10.0, 3.0 + 0.1 * k), 1));
    EXPECT_LT(g, prev);
    prev = g;
  }
}
