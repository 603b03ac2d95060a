// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "uqc/errors.hpp"
#include "uqc/metrics/metrics.hpp"
#include "uqc/metrics/stats.hpp"

namespace uqc {
namespace {

double brier_oracle(const std::vector<Distribution>& p, const std::vector<int>& y) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (int c = 0; c < 2; ++c) {
      const double t = c == y[i] ? 1.0 : 0.0;
      total += (p[i][static_cast<std::size_t>(c)] - t) * (p[i][static_cast<std::size_t>(c)] - t);
    }
  }
  return total / static_cast<double>(p.size());
}

double f1_oracle(const std::vector<Distribution>& p, const std::vector<int>& y) {
  double tp = 0;
  double fp = 0;
  double fn = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool pos = p[i][1] > p[i][0];
    if (pos && y[i] == 1) tp += 1;
    if (pos && y[i] == 0) fp += 1;
    if (!pos && y[i] == 1) fn += 1;
  }
  return tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
}

TEST(Brier, KnownValues) {
  const std::vector<Distribution> perfect{{1, 0}};
  const std::vector<int> y0{0};
  EXPECT_EQ(brier(perfect, y0), 0.0);
  const std::vector<Distribution> half{{0.5, 0.5}};
  EXPECT_EQ(brier(half, y0), 0.5);
}

TEST(Brier, Errors) {
  const std::vector<Distribution> p{{0.5, 0.5}};
  const std::vector<int> two{0, 1};
  EXPECT_THROW(brier(p, two), ArgumentError);
  EXPECT_THROW(brier({}, {}), ArgumentError);
  const std::vector<int> bad{2};
  EXPECT_THROW(brier(p, bad), ArgumentError);
}

TEST(Brier, MatchesOracleAndIsPermutationInvariant) {
  RngStream rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(50);
    std::vector<Distribution> p;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
      p.push_back(testing::random_distribution(rng));
      y.push_back(rng.bernoulli(0.3) ? 1 : 0);
    }
    EXPECT_NEAR(brier(p, y), brier_oracle(p, y), 1e-14);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<Distribution> p2;
    std::vector<int> y2;
    for (std::size_t i : order) {
      p2.push_back(p[i]);
      y2.push_back(y[i]);
    }
    EXPECT_NEAR(brier(p, y), brier(p2, y2), 1e-14);
    EXPECT_EQ(classification_report(p, y).f1, classification_report(p2, y2).f1);
  }
}

TEST(Brier, ProperScoringGrid) {
  // For y ~ Bernoulli(q), E[Brier(p)] = 2 * (q (1-p)^2 + (1-q) p^2); the grid
  // minimiser must be p = q.
  for (int qi = 0; qi <= 20; ++qi) {
    const double q = qi * 0.05;
    int best = -1;
    double best_val = 1e300;
    for (int pi = 0; pi <= 20; ++pi) {
      const double p = pi * 0.05;
      const std::vector<Distribution> pred{{1 - p, p}};
      const std::vector<int> pos{1};
      const std::vector<int> neg{0};
      const double expected = q * brier(pred, pos) + (1 - q) * brier(pred, neg);
      EXPECT_NEAR(expected, 2 * (q * (1 - p) * (1 - p) + (1 - q) * p * p), 1e-14);
      if (expected < best_val - 1e-15) {
        best_val = expected;
        best = pi;
      }
    }
    EXPECT_EQ(best, qi);
  }
}

TEST(F1, Counts) {
  EXPECT_NEAR(f1_from_counts(2, 1, 1), 4.0 / 6.0, 1e-15);
  EXPECT_EQ(f1_from_counts(0, 0, 3), 0.0);
  EXPECT_EQ(f1_from_counts(0, 0, 0), 0.0);
}

TEST(F1, ReportCasesAndTieRule) {
  const std::vector<Distribution> p{{0.1, 0.9}, {0.8, 0.2}, {0.5, 0.5}};
  const std::vector<int> y{1, 0, 1};
  const EvalReport r = classification_report(p, y);
  EXPECT_EQ(r.tp, 1u);
  EXPECT_EQ(r.tn, 1u);
  // A tie predicts the negative class.
  EXPECT_EQ(r.fn, 1u);
  EXPECT_EQ(r.fp, 0u);
  EXPECT_NEAR(r.f1, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 0.5);

  const std::vector<Distribution> right{{0.1, 0.9}, {0.9, 0.1}};
  const std::vector<int> yr{1, 0};
  EXPECT_EQ(classification_report(right, yr).f1, 1.0);
  const std::vector<Distribution> none{{0.9, 0.1}, {0.9, 0.1}};
  EXPECT_EQ(classification_report(none, yr).f1, 0.0);
}

TEST(F1, MatchesOracle) {
  RngStream rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(40);
    std::vector<Distribution> p;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
      p.push_back(testing::random_distribution(rng));
      y.push_back(rng.bernoulli(0.4) ? 1 : 0);
    }
    EXPECT_NEAR(classification_report(p, y).f1, f1_oracle(p, y), 1e-14);
  }
}

TEST(Ranks, AverageTies) {
  const std::vector<double> v{3.0, 1.0, 3.0, 2.0};
  const auto r = average_ranks(v);
  EXPECT_EQ(r, (std::vector<double>{3.5, 1.0, 3.5, 2.0}));
}

TEST(Spearman, KnownValues) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> up{2, 4, 6, 8, 10};
  const std::vector<double> down{5, 4, 3, 2, 1};
  EXPECT_NEAR(spearman_rho(x, up), 1.0, 1e-15);
  EXPECT_NEAR(spearman_rho(x, down), -1.0, 1e-15);
  // Reference values from scipy.stats.spearmanr.
  const std::vector<double> tied{5, 6, 7, 8, 7};
  EXPECT_NEAR(spearman_rho(x, tied), 0.8207826816681233, 1e-12);
  const std::vector<double> xi{0, 0.1, 0.2, 0.3, 0.4};
  const std::vector<double> f1{0.6, 0.58, 0.59, 0.55, 0.5};
  EXPECT_NEAR(spearman_rho(xi, f1), -0.9, 1e-12);
  const std::vector<double> flat{1, 1, 1, 1, 1};
  EXPECT_EQ(spearman_rho(x, flat), 0.0);
  EXPECT_THROW(spearman_rho(std::vector<double>{1}, std::vector<double>{1}), ArgumentError);
}

// Exhaustive count of pairs (a, b) with a > b, ties counting one half.
double u_by_enumeration(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (double x : a) {
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  }
  return u;
}

TEST(MannWhitney, MatchesEnumerationAndReference) {
  struct Case {
    std::vector<double> a;
    std::vector<double> b;
    double u;
    double p;
  };
  // U and one-sided p from scipy.stats.mannwhitneyu(a, b, alternative="greater",
  // method="asymptotic", use_continuity=True).
  const std::vector<Case> cases = {
      {{4, 5, 6}, {1, 2, 3}, 9.0, 0.04042779918502612},
      {{1, 2, 2, 3, 5, 5}, {2, 3, 3, 4, 4}, 13.0, 0.6798132302734756},
      {{0.61, 0.58, 0.66, 0.70, 0.59, 0.64, 0.62, 0.65, 0.60, 0.63},
       {0.55, 0.57, 0.60, 0.52, 0.58, 0.61, 0.54, 0.56, 0.59, 0.53},
       92.0,
       0.0008394681373986888},
      {{1, 2, 3, 4}, {1, 2, 3, 4}, 8.0, 0.5587899429622483},
  };
  for (const auto& c : cases) {
    const auto r = mann_whitney_u(c.a, c.b);
    EXPECT_EQ(r.u_a, c.u);
    EXPECT_EQ(r.u_a, u_by_enumeration(c.a, c.b));
    EXPECT_EQ(r.u_b, u_by_enumeration(c.b, c.a));
    EXPECT_NEAR(r.p_greater, c.p, 1e-12);
  }
}

TEST(MannWhitney, SmallerGroupHasZeroU) {
  const std::vector<double> lo{1, 2, 3};
  const std::vector<double> hi{4, 5, 6};
  const auto r = mann_whitney_u(lo, hi);
  EXPECT_EQ(r.u_a, 0.0);
  EXPECT_EQ(r.u_b, 9.0);
  EXPECT_GT(r.p_greater, 0.9);
}

TEST(MannWhitney, IdenticalGroupsNearHalf) {
  const std::vector<double> a{0.3, 0.5, 0.7, 0.9, 0.1};
  EXPECT_NEAR(mann_whitney_u(a, a).p_greater, 0.5, 0.1);
  const std::vector<double> c{1, 1, 1};
  EXPECT_EQ(mann_whitney_u(c, c).p_greater, 0.5);
}

TEST(MannWhitney, ShiftedGaussiansUsuallySignificant) {
  int significant = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RngStream rng(seed);
    std::vector<double> a;
    std::vector<double> b;
    for (int i = 0; i < 10; ++i) {
      a.push_back(rng.normal() + 1.0);
      b.push_back(rng.normal());
    }
    if (mann_whitney_u(a, b).p_greater < 0.05) ++significant;
  }
  // Power of the one-sided test at n = 10 per group and a 1-sigma shift is
  // roughly 0.6-0.7.
  EXPECT_GT(significant, 20);
}

TEST(MannWhitney, NeedsTwoPerGroup) {
  const std::vector<double> one{1.0};
  const std::vector<double> two{1.0, 2.0};
  EXPECT_THROW(mann_whitney_u(one, two), ArgumentError);
  EXPECT_THROW(mann_whitney_u(two, one), ArgumentError);
}

TEST(Stats, MeanVarianceStd) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_EQ(mean(v), 2.5);
  EXPECT_EQ(population_variance(v), 1.25);
  EXPECT_NEAR(sample_std(v), std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(sample_std(std::vector<double>{3.0}), 0.0);
}

}  // namespace
}  // namespace uqc
