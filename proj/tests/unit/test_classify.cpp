#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "msfbm/analysis.hpp"
#include "msfbm/classify.hpp"
#include "msfbm/errors.hpp"
#include "msfbm/kernels.hpp"
#include "test_util.hpp"

using namespace msfbm;
using namespace msfbm::classify;
using R = SemimartingaleReason;

namespace {

ProcessSpec spec(std::vector<double> a, std::vector<double> h) { return ProcessSpec(std::move(a), std::move(h)); }

// The iff-statement written as a set predicate over the active Hurst values,
// independently of the clause-ordered classifier.
bool iff_predicate(const ProcessSpec& s) {
  std::multiset<double> hs;
  for (std::size_t i : s.active_set()) hs.insert(s.hurst(i));
  if (hs.count(0.5) == 0) return false;
  for (double h : hs) {
    if (h != 0.5 && !(h > 0.75 && h < 1.0)) return false;
  }
  return true;
}

}  // namespace

TEST(Semimartingale, SevenCases) {
  auto v = semimartingale_classify(spec({1}, {0.5}));
  EXPECT_TRUE(v.is_semimartingale);
  EXPECT_EQ(v.witness, 0u);
  EXPECT_EQ(v.reason, R::HalfWitnessAndRest);

  v = semimartingale_classify(spec({1, 1}, {0.5, 0.8}));
  EXPECT_TRUE(v.is_semimartingale);
  EXPECT_EQ(v.reason, R::HalfWitnessAndRest);

  v = semimartingale_classify(spec({1, 1}, {0.5, 0.7}));
  EXPECT_FALSE(v.is_semimartingale);
  EXPECT_EQ(v.reason, R::IntermediateHurst);
  EXPECT_FALSE(v.witness.has_value());

  v = semimartingale_classify(spec({1, 1}, {0.5, 0.75}));
  EXPECT_FALSE(v.is_semimartingale);
  EXPECT_EQ(v.reason, R::IntermediateHurst);

  v = semimartingale_classify(spec({1, 1}, {0.3, 0.9}));
  EXPECT_FALSE(v.is_semimartingale);
  EXPECT_EQ(v.reason, R::LowHurstComponent);

  v = semimartingale_classify(spec({1, 1}, {0.8, 0.9}));
  EXPECT_FALSE(v.is_semimartingale);
  EXPECT_EQ(v.reason, R::AllAboveHalf);

  v = semimartingale_classify(spec({1, 0}, {0.5, 0.3}));
  EXPECT_TRUE(v.is_semimartingale);
  EXPECT_EQ(v.witness, 0u);
}

TEST(Semimartingale, LowestWitnessAndReasonNames) {
  const auto v = semimartingale_classify(spec({0, 2, 3}, {0.5, 0.5, 0.5}));
  EXPECT_EQ(v.witness, 1u);
  EXPECT_EQ(to_string(R::HalfWitnessAndRest), "HalfWitnessAndRest");
  EXPECT_EQ(to_string(R::LowHurstComponent), "LowHurstComponent");
  EXPECT_EQ(to_string(R::AllAboveHalf), "AllAboveHalf");
  EXPECT_EQ(to_string(R::IntermediateHurst), "IntermediateHurst");
}

TEST(Semimartingale, ExhaustiveSweepAgainstPredicate) {
  const double grid[] = {0.3, 0.5, 0.6, 0.75, 0.8};
  for (double h1 : grid) {
    for (double h2 : grid) {
      for (double a2 : {0.0, 1.0}) {
        const auto s = spec({1, a2}, {h1, h2});
        const auto v = semimartingale_classify(s);
        EXPECT_EQ(v.is_semimartingale, iff_predicate(s)) << h1 << " " << h2 << " " << a2;
        EXPECT_EQ(v.is_semimartingale, v.reason == R::HalfWitnessAndRest);
        EXPECT_EQ(v.is_semimartingale, v.witness.has_value());
      }
    }
  }
}

TEST(Semimartingale, InvariantUnderRescaling) {
  test::Draws draws(31);
  const double hs[] = {0.3, 0.5, 0.6, 0.75, 0.8, 0.9};
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = std::size_t(draws.integer(1, 3));
    std::vector<double> a(n), h(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = draws.integer(0, 2) == 0 ? 0.0 : draws.uniform(-3, 3);
      h[i] = hs[draws.integer(0, 5)];
    }
    if (std::all_of(a.begin(), a.end(), [](double x) { return x == 0.0; })) a[0] = 1.0;
    const auto s = spec(a, h);
    const auto r = kernels::rescale_coeffs(s, draws.uniform(0.01, 100.0));
    const auto v1 = semimartingale_classify(s), v2 = semimartingale_classify(r);
    EXPECT_EQ(v1.is_semimartingale, v2.is_semimartingale);
    EXPECT_EQ(v1.reason, v2.reason);
    EXPECT_EQ(v1.witness, v2.witness);
    EXPECT_EQ(markov_verdict(s), markov_verdict(r));
    EXPECT_EQ(increment_sign_predict(s), increment_sign_predict(r));
  }
}

TEST(Markov, Examples) {
  EXPECT_TRUE(markov_verdict(spec({1, 2}, {0.5, 0.5})));
  EXPECT_FALSE(markov_verdict(spec({1}, {0.6})));
  EXPECT_TRUE(markov_verdict(spec({1, 0}, {0.5, 0.9})));
}

TEST(IncrementSign, Examples) {
  EXPECT_EQ(increment_sign_predict(spec({1, 1}, {0.5, 0.5})), Sign::Zero);
  EXPECT_EQ(increment_sign_predict(spec({1, 1}, {0.6, 0.9})), Sign::Positive);
  EXPECT_EQ(increment_sign_predict(spec({1, 1}, {0.2, 0.4})), Sign::Negative);
  EXPECT_EQ(increment_sign_predict(spec({1, 1}, {0.3, 0.8})), Sign::Indeterminate);
  EXPECT_EQ(increment_sign_predict(spec({1, 0}, {0.3, 0.8})), Sign::Negative);
}

TEST(IncrementSign, AgreesWithKernelOnRandomWindows) {
  test::Draws draws(32);
  int checked = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const double lo = draws.integer(0, 1) ? 0.05 : 0.5;
    auto s = draws.spec(4, lo, lo == 0.05 ? 0.5 : 0.95);
    if (draws.integer(0, 4) == 0) s = spec(std::vector<double>(s.coeffs().begin(), s.coeffs().end()),
                                           std::vector<double>(s.size(), 0.5));
    double q[4];
    for (double& x : q) x = draws.uniform(0, 10);
    std::sort(q, q + 4);
    if (!(q[0] < q[1] && q[2] < q[3])) continue;
    const double c = kernels::increment_cov(s, kernels::IncrementWindow(q[0], q[1], q[2], q[3]));
    switch (increment_sign_predict(s)) {
      case Sign::Zero: EXPECT_LE(std::abs(c), 1e-12 * test::cov_scale(s, q[3])); break;
      case Sign::Positive: EXPECT_GT(c, 0.0); break;
      case Sign::Negative: EXPECT_LT(c, 0.0); break;
      case Sign::Indeterminate: continue;
    }
    ++checked;
  }
  EXPECT_GT(checked, 900);
}

TEST(DependenceCompare, Examples) {
  const kernels::IncrementWindow w(0, 1, 1, 2);
  EXPECT_EQ(dependence_compare(spec({1}, {0.5}), 0, 1, 2, w), Ordering::Equal);
  EXPECT_EQ(dependence_compare(spec({1}, {0.8}), 0, 1, 2, w), Ordering::Greater);
  EXPECT_EQ(dependence_compare(spec({1}, {0.3}), 0, 1, 2, w), Ordering::Less);
  EXPECT_EQ(dependence_compare(spec({1}, {0.8}), 0, 1.5, -1.5, w), Ordering::Equal);
  EXPECT_EQ(dependence_compare(spec({1, 1}, {0.8, 0.3}), 1, 0, 2, w), Ordering::Less);
  EXPECT_THROW(dependence_compare(spec({1}, {0.8}), 0, 3, 2, w), PreconditionViolated);
}

TEST(DependenceCompare, MatchesFullCovarianceDifference) {
  test::Draws draws(33);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto s = draws.spec();
    const std::size_t i = std::size_t(draws.integer(0, int(s.size()) - 1));
    double b = draws.uniform(0.1, 5), c = draws.uniform(0.1, 5);
    if (b > c) std::swap(b, c);
    double q[4];
    for (double& x : q) x = draws.uniform(0, 10);
    std::sort(q, q + 4);
    if (!(q[0] < q[1] && q[2] < q[3]) || b == c) continue;
    const kernels::IncrementWindow w(q[0], q[1], q[2], q[3]);
    EXPECT_EQ(dependence_compare(s, i, b, c, w), predicted_dependence_order(s, i));
    const double diff = kernels::increment_cov(s.with_coeff(i, c), w) - kernels::increment_cov(s.with_coeff(i, b), w);
    const double comp = kernels::component_increment_cov(s.hurst(i), w);
    // Whenever the full difference is resolved above rounding, its sign agrees.
    if (std::abs(diff) > 1e-10 * test::cov_scale(s.with_coeff(i, c), q[3])) {
      EXPECT_EQ(diff > 0, comp > 0);
    }
  }
}

// Classification against the empirical quadratic-variation signature.
TEST(Semimartingale, ConsistentWithQuadraticVariation) {
  test::Draws draws(34);
  const double hs[] = {0.3, 0.5, 0.6, 0.8, 0.9};
  const std::vector<int> levels{5, 6, 7, 8, 9};
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = std::size_t(draws.integer(1, 2));
    std::vector<double> a(n), h(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = draws.integer(0, 1) ? 1.0 : -1.0;
      h[i] = hs[draws.integer(0, 4)];
    }
    const auto s = spec(a, h);
    const auto v = semimartingale_classify(s);
    const double slope = analysis::qv_scaling_exponent(s, levels, 40, 100 + rep).fitted_log_slope;
    if (slope > 0.1) {
      EXPECT_EQ(v.reason, R::LowHurstComponent) << h[0] << " slope " << slope;
    } else if (slope < -0.1) {
      EXPECT_EQ(v.reason, R::AllAboveHalf) << h[0] << " slope " << slope;
    } else {
      EXPECT_TRUE(v.reason == R::HalfWitnessAndRest || v.reason == R::IntermediateHurst) << h[0] << " slope " << slope;
    }
    if (v.is_semimartingale) EXPECT_LE(std::abs(slope), 0.1);
  }
}
