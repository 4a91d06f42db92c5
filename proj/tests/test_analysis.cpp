#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "digits/analysis/dichotomies.hpp"
#include "digits/analysis/learning.hpp"
#include "digits/core/error.hpp"

using namespace digits;
using namespace digits::analysis;

namespace {

// Binomial upper tail by the pmf recurrence in long double, summed directly.
double tail_oracle(std::size_t m, double k, double tau) {
  if (k == 0.0) return 0.0;
  long double p = std::pow(1.0L - k, static_cast<long double>(m));
  long double total = 0.0L;
  const auto start = static_cast<std::size_t>(std::floor(tau * static_cast<double>(m) + 1e-9)) + 1;
  for (std::size_t i = 0; i <= m; ++i) {
    if (i >= start) total += p;
    p = p * static_cast<long double>(m - i) / static_cast<long double>(i + 1) * k / (1.0L - k);
  }
  return static_cast<double>(total);
}

SampleSequence points(const std::vector<std::vector<double>>& xs) {
  SampleSequence s(xs.front().size(), 0);
  for (const auto& x : xs) s.append(x);
  return s;
}

}  // namespace

TEST(Learning, VcCost) {
  EXPECT_EQ(vc_cost(0.1, 0.05, 1), 775u);
  const double direct = (1 / 0.1) * (4 * std::log2(2 / 0.05) + 8 * 1 * std::log2(13 / 0.1));
  EXPECT_EQ(vc_cost(0.1, 0.05, 1), static_cast<std::size_t>(std::ceil(direct)));
  EXPECT_GT(vc_cost(0.1, 0.05, 2), vc_cost(0.1, 0.05, 1));
  EXPECT_GT(vc_cost(0.05, 0.05, 1), vc_cost(0.1, 0.05, 1));
  LearningParams p;
  p.alpha = 0.05;  // epsilon 0.1 > alpha
  EXPECT_THROW(validate(p), ConfigError);
  EXPECT_THROW(vc_cost(0.1, 1.0, 1), ConfigError);
}

TEST(Learning, HoeffdingN) {
  EXPECT_EQ(hoeffding_n(0.05, 0.05), 738u);
  // ceil(ln(2/(1-1e-9)) / 0.5) = ceil(1.386...) = 2; the floor of 1 does not bind here.
  EXPECT_EQ(hoeffding_n(0.5, 1 - 1e-9), 2u);
  const auto n1 = hoeffding_n(0.02, 0.05), n2 = hoeffding_n(0.01, 0.05);
  EXPECT_NEAR(static_cast<double>(n2) / static_cast<double>(n1), 4.0, 0.01);
  EXPECT_GE(hoeffding_n(0.99, 0.99), 1u);
  EXPECT_THROW(hoeffding_n(0.0, 0.05), ConfigError);
}

TEST(Learning, SauerBound) {
  EXPECT_NEAR(sauer_bound(1, 10), std::exp(1.0) * 10, 1e-9);
  EXPECT_NEAR(sauer_bound(3, 3), std::exp(3.0), 1e-9);
  EXPECT_NEAR(sauer_bound(2, 50), std::pow(25 * std::exp(1.0), 2), 1e-6);
  EXPECT_THROW(sauer_bound(3, 2), ConfigError);
  EXPECT_THROW(sauer_bound(0, 2), ConfigError);
}

TEST(Learning, TailExactAgainstDirectSum) {
  EXPECT_LT(tail_exact({100, 0.1, 0.2}), 0.001);
  EXPECT_EQ(tail_exact({50, 0.3, 1.0}), 0.0);
  EXPECT_EQ(tail_exact({50, 0.0, 0.5}), 0.0);
  for (std::size_t m : {1, 5, 17, 60, 100, 250}) {
    for (double k : {0.01, 0.1, 0.3}) {
      for (double tau : {0.05, 0.2, 0.5, 0.9}) {
        if (tau <= k) continue;
        const double got = tail_exact({m, k, tau}), want = tail_oracle(m, k, tau);
        EXPECT_NEAR(got, want, 1e-12 + 1e-9 * want) << m << " " << k << " " << tau;
      }
    }
  }
  EXPECT_THROW(tail_exact({10, 0.3, 0.2}), ConfigError);
}

TEST(Learning, TailBoundsDominate) {
  const auto b = tail_bounds({100, 0.1, 0.2});
  EXPECT_NEAR(b.hoeffding, std::exp(-2.0), 1e-12);
  EXPECT_LE(b.kl, b.hoeffding);
  for (std::size_t m = 10; m <= 200; m += 10) {
    for (double k : {0.02, 0.1, 0.25}) {
      for (double tau : {0.15, 0.3, 0.6}) {
        if (tau <= k) continue;
        const auto t = tail_bounds({m, k, tau});
        const double exact = tail_exact({m, k, tau});
        EXPECT_LE(exact, t.kl * (1 + 1e-12));
        EXPECT_LE(t.kl, t.hoeffding * (1 + 1e-12));
      }
    }
  }
  const auto degenerate = tail_bounds({30, 0.0, 0.5});
  EXPECT_EQ(degenerate.hoeffding, 0.0);
  EXPECT_EQ(degenerate.kl, 0.0);
}

TEST(Learning, TailMonotonicity) {
  for (std::size_t m : {20, 80}) {
    double prev = 2.0;
    for (double tau = 0.15; tau <= 1.0; tau += 0.05) {
      const double t = tail_exact({m, 0.1, tau});
      EXPECT_LE(t, prev + 1e-15);
      prev = t;
    }
    prev = -1.0;
    for (double k = 0.0; k < 0.5; k += 0.05) {
      const double t = tail_exact({m, k, 0.5});
      EXPECT_GE(t, prev - 1e-15);
      prev = t;
    }
  }
}

TEST(Learning, FailureBoundComposition) {
  const auto f = failure_bound(0.05, {100, 0.1, 0.2});
  EXPECT_NEAR(f.total, 0.05 + tail_exact({100, 0.1, 0.2}), 1e-15);
  EXPECT_GE(f.total, f.net_failure);
  EXPECT_GE(f.total, f.tail);
  EXPECT_EQ(failure_bound(0.9, {10, 0.4, 0.45}).total, 1.0);
}

TEST(Dichotomies, IntervalExample) {
  BoxSynthesizer synth(interval_family());
  const auto s = points({{0.4}, {0.6}});
  EXPECT_EQ(count_dichotomies_enumerated(synth, s, 2), 3u);
  EXPECT_EQ(*count_dichotomies_closed_form(*interval_family(), s, 2), 3u);
  EXPECT_EQ(count_dichotomies(synth, s, 0), 1u);
  // A point at 0 is always labeled 1 by [0,a]: one dichotomy fewer.
  const auto z = points({{0.0}, {0.4}, {0.6}});
  EXPECT_EQ(count_dichotomies_enumerated(synth, z, 3), 3u);
  EXPECT_EQ(*count_dichotomies_closed_form(*interval_family(), z, 3), 3u);
}

TEST(Dichotomies, ClosedFormsMatchEnumeration) {
  for (std::size_t d : {1u, 2u}) {
    const auto fam = box_family(d);
    BoxSynthesizer synth(fam);
    const auto dist = InputDistribution::uniform_box(std::vector<double>(d, -1.0), std::vector<double>(d, 1.0));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto s = sample(dist, seed, 10);
      for (std::size_t m = 0; m <= 10; ++m) {
        ASSERT_EQ(*count_dichotomies_closed_form(*fam, s, m), count_dichotomies_enumerated(synth, s, m))
            << "d=" << d << " seed=" << seed << " m=" << m;
      }
    }
  }
  BoxSynthesizer isynth(interval_family());
  const auto s = sample(InputDistribution::uniform_box({0.0}, {1.0}), 3, 12);
  for (std::size_t m = 0; m <= 12; ++m) {
    EXPECT_EQ(*count_dichotomies_closed_form(*interval_family(), s, m), m + 1);
    EXPECT_EQ(count_dichotomies_enumerated(isynth, s, m), m + 1);
  }
  EXPECT_EQ(count_dichotomies_enumerated(isynth, s, 12, Execution::serial), 13u);
  EXPECT_THROW(count_dichotomies_enumerated(isynth, sample(InputDistribution::uniform_box({0.0}, {1.0}), 3, 21), 21),
               ConfigError);
}

TEST(Dichotomies, MonotoneAndBelowSauer) {
  const auto fam = box_family(1);  // VC dimension 2
  BoxSynthesizer synth(fam);
  const auto dist = InputDistribution::uniform_box({-1.0}, {1.0});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = sample(dist, seed, 50);
    std::size_t prev = 0;
    for (std::size_t m = 0; m <= 50; ++m) {
      const auto c = count_dichotomies(synth, s, m);
      EXPECT_GE(c, prev);
      prev = c;
      if (m >= 2) {
        EXPECT_LE(static_cast<double>(c), sauer_bound(2, m));
      }
    }
    EXPECT_EQ(prev, 50u * 51u / 2u + 1u);
  }
  const auto fam2 = box_family(2);  // VC dimension 4
  BoxSynthesizer synth2(fam2);
  const auto s2 = sample(InputDistribution::uniform_box({-1.0, -1.0}, {1.0, 1.0}), 1, 20);
  std::size_t prev = 0;
  for (std::size_t m = 0; m <= 20; ++m) {
    const auto c = count_dichotomies(synth2, s2, m);
    EXPECT_GE(c, prev);
    prev = c;
    if (m >= 4) {
      EXPECT_LE(static_cast<double>(c), sauer_bound(4, m));
    }
  }
}

TEST(Dichotomies, PredictedQueriesForIntervals) {
  BoxSynthesizer synth(interval_family());
  const auto s = sample(InputDistribution::uniform_box({0.0}, {1.0}), 5, 30);
  EXPECT_EQ(predicted_queries(synth, s, 30), 465u);
  EXPECT_EQ(predicted_queries(synth, s, 12, true), 78u);
}

TEST(EpsilonNet, MatchesGridOracle) {
  const auto fam = interval_family();
  const auto dist = InputDistribution::uniform_box({0.0}, {1.0});
  const auto target = make_interval(0.5);
  const double eps = 0.1;
  EXPECT_FALSE(epsilon_net_check(*fam, target, dist, eps, SampleSequence(1, 0), 0));
  EXPECT_TRUE(epsilon_net_check(*fam, target, dist, eps, points({{0.45}, {0.55}}), 2));
  // Oracle: enumerate the grid a = i/1000 and look for a far program that
  // labels every sample like the target.
  auto oracle = [&](const std::vector<std::vector<double>>& xs) {
    for (int i = 0; i <= 1000; ++i) {
      const double a = std::min(1.0, i * 0.001);
      if (!(std::fabs(a - 0.5) > eps + 1e-12)) continue;
      bool agrees = true;
      for (const auto& x : xs) agrees = agrees && ((x[0] <= a) == (x[0] <= 0.5));
      if (agrees) return false;
    }
    return true;
  };
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = std::uniform_int_distribution<int>(0, 12)(rng);
    std::vector<std::vector<double>> xs;
    for (int i = 0; i < n; ++i) xs.push_back({std::uniform_real_distribution<double>(0.0, 1.0)(rng)});
    const auto s = xs.empty() ? SampleSequence(1, 0) : points(xs);
    ASSERT_EQ(epsilon_net_check(*fam, target, dist, eps, s, xs.size()), oracle(xs)) << trial;
  }
  EXPECT_THROW(epsilon_net_check(*box_family(2), make_empty_box(2),
                                 InputDistribution::uniform_box({-1.0, -1.0}, {1.0, 1.0}), eps, SampleSequence(2, 0), 0),
               UnsupportedError);
}
