#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qtypology/rng.hpp"
#include "qtypology/stats.hpp"

using namespace qtypology;

namespace {

// Small integers so ties and zero differences are common.
std::vector<double> draw(Rng& rng, std::size_t n, std::uint64_t range) {
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(rng.below(range));
  return v;
}

}  // namespace

TEST(Ranks, MidranksMatchCountingOracle) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto v = draw(rng, 1 + rng.below(15), 1 + rng.below(6));
    const auto r = average_ranks(v);
    const auto o = oracle::doubled_midranks(v);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(2.0 * r[i], static_cast<double>(o[i]));
  }
}

TEST(Wilcoxon, ExactMatchesSignEnumeration) {
  Rng rng(2);
  int checked = 0;
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 1 + rng.below(12);
    const auto a = draw(rng, n, 5), b = draw(rng, n, 5);
    if (a == b) continue;
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) any = any || a[i] != b[i];
    if (!any) {
      EXPECT_THROW(wilcoxon_signed_rank(a, b), Error);
      continue;
    }
    const auto got = wilcoxon_signed_rank(a, b);
    const auto [stat, p] = oracle::wilcoxon(a, b);
    ASSERT_TRUE(got.exact);
    ASSERT_EQ(got.statistic, stat);
    ASSERT_EQ(got.p_value, p);
    ++checked;
  }
  EXPECT_GT(checked, 1500);
}

TEST(Wilcoxon, NormalApproximationByHand) {
  std::vector<double> before(30, 0.0), after(30);
  for (int i = 0; i < 30; ++i) after[static_cast<std::size_t>(i)] = i + 1;
  const auto r = wilcoxon_signed_rank(before, after);
  EXPECT_FALSE(r.exact);
  EXPECT_EQ(r.statistic, 0.0);
  const double z = (465.0 - 232.5) / std::sqrt(30.0 * 31 * 61 / 24);
  EXPECT_NEAR(r.p_value, std::erfc(z / std::sqrt(2.0)), 1e-15);
}

TEST(Wilcoxon, PrattKeepsZerosInRanking) {
  const std::vector<double> before{0, 0, 0}, after{0, 1, 2};
  const auto w = wilcoxon_signed_rank(before, after, ZeroMethod::kWilcoxon);
  const auto p = wilcoxon_signed_rank(before, after, ZeroMethod::kPratt);
  EXPECT_EQ(w.n, 2u);
  EXPECT_EQ(p.n, 2u);
  EXPECT_EQ(w.p_value, 0.5);
  EXPECT_EQ(p.p_value, 0.5);
  // -1 vs +3 with a zero present: ranks 2 and 3 under Pratt, 1 and 2 otherwise.
  const auto w2 = wilcoxon_signed_rank({0, 1, 0}, {0, 0, 3});
  const auto p2 = wilcoxon_signed_rank({0, 1, 0}, {0, 0, 3}, ZeroMethod::kPratt);
  EXPECT_EQ(w2.statistic, 1.0);
  EXPECT_EQ(p2.statistic, 2.0);
}

TEST(Wilcoxon, RejectsMismatchedLengths) { EXPECT_THROW(wilcoxon_signed_rank({1}, {1, 2}), Error); }

TEST(MannWhitney, ExactMatchesSplitEnumeration) {
  Rng rng(3);
  for (int t = 0; t < 1500; ++t) {
    const std::size_t n1 = 1 + rng.below(11);
    const std::size_t n2 = 1 + rng.below(12 - n1);
    const auto x = draw(rng, n1, 1 + rng.below(8)), y = draw(rng, n2, 1 + rng.below(8));
    const auto got = mann_whitney_u(x, y);
    const auto [u, p] = oracle::mann_whitney(x, y);
    ASSERT_TRUE(got.exact);
    ASSERT_EQ(got.statistic, u);
    ASSERT_EQ(got.p_value, p);
  }
}

TEST(MannWhitney, SmallKnownCase) {
  const auto r = mann_whitney_u({1, 2}, {3, 4});
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0 / 3.0);
}

TEST(MannWhitney, NormalApproximationByHand) {
  std::vector<double> x, y;
  for (int i = 1; i <= 7; ++i) x.push_back(i);
  for (int i = 8; i <= 14; ++i) y.push_back(i);
  const auto r = mann_whitney_u(x, y);
  EXPECT_FALSE(r.exact);
  EXPECT_EQ(r.statistic, 0.0);
  const double z = (24.5 - 0.5) / std::sqrt(7.0 * 7 * 15 / 12);
  EXPECT_NEAR(r.p_value, std::erfc(z / std::sqrt(2.0)), 1e-15);
}

TEST(MannWhitney, AllTiedIsNotSignificant) {
  const auto r = mann_whitney_u(std::vector<double>(8, 1.0), std::vector<double>(9, 1.0));
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_THROW(mann_whitney_u({}, {1}), Error);
}

TEST(Binomial, ExactOnSmallSamples) {
  for (std::size_t n = 1; n <= 12; ++n)
    for (std::size_t k = 0; k <= n; ++k)
      for (double p0 : {0.05, 0.1, 0.14, 0.25, 1.0 / 3, 0.5, 0.6, 0.9})
        ASSERT_EQ(binomial_test(k, n, p0), oracle::binomial(k, n, p0)) << k << "/" << n << " p0=" << p0;
}

TEST(Binomial, MatchesPascalOracle) {
  Rng rng(4);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng.below(60);
    const std::size_t k = rng.below(n + 1);
    const double p0 = 0.02 + 0.96 * rng.uniform();
    const double want = oracle::binomial(k, n, p0);
    EXPECT_NEAR(binomial_test(k, n, p0), want, 1e-12 * std::max(1.0, want)) << k << "/" << n << " p0=" << p0;
  }
}

TEST(Binomial, KnownValues) {
  EXPECT_DOUBLE_EQ(binomial_test(2, 2, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(binomial_test(1, 2, 0.5), 1.0);
  EXPECT_LT(binomial_test(28, 100, 0.14), 0.01);
  EXPECT_THROW(binomial_test(3, 2, 0.5), Error);
  EXPECT_THROW(binomial_test(1, 2, 1.0), Error);
  // Large n falls back to lgamma coefficients.
  EXPECT_NEAR(binomial_test(100, 200, 0.5), 1.0, 1e-9);
}

TEST(LogOdds, KnownValueAndInterval) {
  const auto r = log_odds_ratio(20, 80, 10, 90);
  EXPECT_NEAR(r.log_odds, std::log(2.25), 1e-15);
  const double se = std::sqrt(1 / 20.0 + 1 / 80.0 + 1 / 10.0 + 1 / 90.0);
  EXPECT_NEAR(r.se, se, 1e-15);
  EXPECT_NEAR(r.ci_low, std::log(2.25) - 1.96 * se, 1e-15);
  EXPECT_NEAR(r.ci_high, std::log(2.25) + 1.96 * se, 1e-15);
  EXPECT_FALSE(r.haldane);
}

TEST(LogOdds, AntisymmetricUnderGroupSwap) {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const double a = static_cast<double>(rng.below(50)), b = static_cast<double>(1 + rng.below(50));
    const double c = static_cast<double>(rng.below(50)), d = static_cast<double>(1 + rng.below(50));
    EXPECT_NEAR(log_odds_ratio(a, b, c, d).log_odds, -log_odds_ratio(c, d, a, b).log_odds, 1e-12);
  }
}

TEST(LogOdds, HaldaneOnZeroCell) {
  const auto r = log_odds_ratio(0, 10, 5, 5);
  EXPECT_TRUE(r.haldane);
  EXPECT_NEAR(r.log_odds, std::log(0.5 / 10.5) - std::log(5.5 / 5.5), 1e-15);
  EXPECT_THROW(log_odds_ratio(0, 0, 1, 1), Error);
  EXPECT_THROW(log_odds_ratio(-1, 1, 1, 1), Error);
}

TEST(Stars, Thresholds) {
  EXPECT_EQ(significance_stars(0.0009), "***");
  EXPECT_EQ(significance_stars(0.001), "**");
  EXPECT_EQ(significance_stars(0.0099), "**");
  EXPECT_EQ(significance_stars(0.01), "*");
  EXPECT_EQ(significance_stars(0.049), "*");
  EXPECT_EQ(significance_stars(0.05), "");
}

TEST(Median, EvenOddEmpty) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_THROW(median({}), Error);
}
