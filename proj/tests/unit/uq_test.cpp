// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "support/oracles.hpp"
#include "uqc/errors.hpp"
#include "uqc/models/predict.hpp"
#include "uqc/uq/assess.hpp"
#include "uqc/uq/uq.hpp"

namespace uqc {
namespace {

const double kLn2 = std::log(2.0);

std::vector<Distribution> random_samples(RngStream& rng, std::size_t t) {
  std::vector<Distribution> v;
  for (std::size_t i = 0; i < t; ++i) v.push_back(testing::random_distribution(rng));
  return v;
}

TEST(MeanPredictive, KnownValues) {
  const std::vector<Distribution> two{{1, 0}, {0, 1}};
  EXPECT_EQ(mean_predictive(two), (Distribution{0.5, 0.5}));
  const std::vector<Distribution> one{{0.3, 0.7}};
  EXPECT_EQ(mean_predictive(one), (Distribution{0.3, 0.7}));
}

TEST(MeanPredictive, MatchesNaiveSum) {
  RngStream rng(1);
  const auto s = random_samples(rng, 100);
  double a = 0.0;
  double b = 0.0;
  for (const auto& d : s) {
    a += d[0];
    b += d[1];
  }
  const Distribution p = mean_predictive(s);
  EXPECT_NEAR(p[0], a / 100.0, 1e-15);
  EXPECT_NEAR(p[1], b / 100.0, 1e-15);
}

TEST(Entropy, KnownValues) {
  EXPECT_NEAR(predictive_entropy({0.5, 0.5}), kLn2, 1e-15);
  EXPECT_EQ(predictive_entropy({1.0, 0.0}), 0.0);
  EXPECT_NEAR(predictive_entropy({0.9, 0.1}), 0.325083, 5e-7);
  EXPECT_NEAR(predictive_entropy({0.9, 0.1}), testing::entropy_oracle(0.9, 0.1), 1e-15);
}

TEST(ExpectedEntropy, KnownValuesAndOracle) {
  const std::vector<Distribution> half(4, Distribution{0.5, 0.5});
  EXPECT_NEAR(expected_entropy(half), kLn2, 1e-15);
  const std::vector<Distribution> hard{{1, 0}, {0, 1}};
  EXPECT_EQ(expected_entropy(hard), 0.0);
  RngStream rng(2);
  const auto s = random_samples(rng, 10);
  double acc = 0.0;
  for (const auto& d : s) acc += testing::entropy_oracle(d[0], d[1]);
  EXPECT_NEAR(expected_entropy(s), acc / 10.0, 1e-12);
}

TEST(MutualInformation, KnownValuesAndOracle) {
  const std::vector<Distribution> same(5, Distribution{0.2, 0.8});
  EXPECT_EQ(mutual_information(same), 0.0);
  const std::vector<Distribution> hard{{1, 0}, {0, 1}};
  EXPECT_NEAR(mutual_information(hard), kLn2, 1e-15);
  RngStream rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random_samples(rng, 7);
    double a = 0.0;
    double b = 0.0;
    double eh = 0.0;
    for (const auto& d : s) {
      a += d[0];
      b += d[1];
      eh += testing::entropy_oracle(d[0], d[1]);
    }
    const double oracle = testing::entropy_oracle(a / 7.0, b / 7.0) - eh / 7.0;
    EXPECT_NEAR(mutual_information(s), oracle, 1e-12);
  }
}

TEST(VarianceDecomposition, KnownValues) {
  const std::vector<Distribution> half(3, Distribution{0.5, 0.5});
  const auto a = total_variance_decompose(half);
  EXPECT_NEAR(a.total, 0.25, 1e-15);
  EXPECT_NEAR(a.epistemic, 0.0, 1e-15);
  EXPECT_NEAR(a.aleatoric, 0.25, 1e-15);
  const std::vector<Distribution> hard{{1, 0}, {0, 1}, {1, 0}, {0, 1}};
  const auto b = total_variance_decompose(hard);
  EXPECT_NEAR(b.total, 0.25, 1e-15);
  EXPECT_NEAR(b.epistemic, 0.25, 1e-15);
  EXPECT_NEAR(b.aleatoric, 0.0, 1e-15);
}

TEST(VarianceDecomposition, MatchesTwoStageClosedForm) {
  // y | t ~ Bernoulli(p_t), t uniform: Var(y) = E[y^2] - E[y]^2 with y^2 = y,
  // E[Var(y|t)] = E[p_t] - E[p_t^2], Var(E[y|t]) = E[p_t^2] - E[p_t]^2.
  RngStream rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_samples(rng, 9);
    double m1 = 0.0;
    double m2 = 0.0;
    for (const auto& d : s) {
      m1 += d[1] / 9.0;
      m2 += d[1] * d[1] / 9.0;
    }
    const auto v = total_variance_decompose(s);
    EXPECT_NEAR(v.total, m1 - m1 * m1, 1e-12);
    EXPECT_NEAR(v.aleatoric, m1 - m2, 1e-12);
    EXPECT_NEAR(v.epistemic, m2 - m1 * m1, 1e-12);
    EXPECT_NEAR(v.aleatoric + v.epistemic, v.total, 1e-12);
  }
}

TEST(UqProperties, IdentitiesBoundsAndSymmetry) {
  RngStream rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t t = 1 + rng.uniform_index(12);
    auto s = random_samples(rng, t);
    if (trial % 3 == 0) s[0] = {1.0, 0.0};
    const UqSummary a = summarize(s);
    EXPECT_GE(a.h_expected, 0.0);
    EXPECT_LE(a.h_expected, a.h_total + 1e-9);
    EXPECT_LE(a.h_total, kLn2 + 1e-9);
    EXPECT_GE(a.mutual_info, 0.0);
    EXPECT_NEAR(a.mutual_info, a.h_total - a.h_expected, 1e-12);
    EXPECT_NEAR(a.var_epistemic + a.var_aleatoric, a.var_total, 1e-12);

    auto shuffled = s;
    rng.shuffle(std::span<Distribution>(shuffled));
    const UqSummary b = summarize(shuffled);
    EXPECT_NEAR(a.h_total, b.h_total, 1e-12);
    EXPECT_NEAR(a.h_expected, b.h_expected, 1e-12);
    EXPECT_NEAR(a.mutual_info, b.mutual_info, 1e-12);
    EXPECT_NEAR(a.var_epistemic, b.var_epistemic, 1e-12);

    // Repeating every sample leaves the empirical distribution unchanged.
    auto doubled = s;
    doubled.insert(doubled.end(), s.begin(), s.end());
    const UqSummary c = summarize(doubled);
    EXPECT_NEAR(a.h_total, c.h_total, 1e-12);
    EXPECT_NEAR(a.mutual_info, c.mutual_info, 1e-12);
    EXPECT_NEAR(a.var_aleatoric, c.var_aleatoric, 1e-12);
  }
}

TEST(HeteroDecompose, SymmetricMeanGivesLn2) {
  const std::vector<Distribution> mu{{0.5, -0.5}, {-0.5, 0.5}};
  const std::vector<Distribution> sigma{{1.0, 2.0}, {0.3, 0.7}};
  RngStream rng(6);
  const auto d = hetero_decompose(mu, sigma, 1000, rng);
  // mu-bar is zero and the logit noise is symmetric about it, so both MC
  // estimates centre on 0.5.
  EXPECT_NEAR(d.p_epi[0], 0.5, 0.02);
  EXPECT_NEAR(d.p_ale[0], 0.5, 0.05);
  EXPECT_NEAR(d.h_epi, kLn2, 2e-3);
  EXPECT_NEAR(d.h_ale, kLn2, 5e-3);
}

TEST(HeteroDecompose, IdenticalMeansTinySigma) {
  // No spread of mu and no noise: both branches collapse to softmax(mu-bar).
  const std::vector<Distribution> mu(4, Distribution{2.0, -1.0});
  const std::vector<Distribution> sigma(4, Distribution{1e-9, 1e-9});
  RngStream rng(7);
  const auto d = hetero_decompose(mu, sigma, 100, rng);
  const Distribution ref = softmax(Distribution{2.0, -1.0});
  EXPECT_NEAR(d.h_ale, predictive_entropy(ref), 1e-6);
  EXPECT_NEAR(d.h_epi, predictive_entropy(ref), 1e-6);
  // Far from the decision boundary both vanish.
  const std::vector<Distribution> far(4, Distribution{40.0, 0.0});
  const auto e = hetero_decompose(far, sigma, 100, rng);
  EXPECT_LT(e.h_epi, 1e-12);
  EXPECT_LT(e.h_ale, 1e-12);
}

TEST(HeteroDecompose, SpreadRaisesEpistemicOnly) {
  const std::vector<Distribution> tight(4, Distribution{3.0, 0.0});
  const std::vector<Distribution> spread{{6.0, 0.0}, {0.0, 0.0}, {6.0, 0.0}, {0.0, 0.0}};
  const std::vector<Distribution> sigma(4, Distribution{0.1, 0.1});
  RngStream r1(8);
  RngStream r2(8);
  const auto a = hetero_decompose(tight, sigma, 20000, r1);
  const auto b = hetero_decompose(spread, sigma, 20000, r2);
  EXPECT_GT(b.h_epi, a.h_epi + 0.05);
  EXPECT_NEAR(b.h_ale, a.h_ale, 1e-12);
}

TEST(HeteroDecompose, MonteCarloConverges) {
  const std::vector<Distribution> mu{{1.2, 0.3}, {0.4, 0.9}, {2.0, 0.1}};
  const std::vector<Distribution> sigma{{0.8, 1.5}, {0.5, 0.4}, {1.1, 0.9}};
  RngStream r1(9);
  RngStream r2(10);
  const auto a = hetero_decompose(mu, sigma, 10000, r1);
  const auto b = hetero_decompose(mu, sigma, 100000, r2);
  EXPECT_NEAR(a.h_ale, b.h_ale, 0.01);
  EXPECT_NEAR(a.h_epi, b.h_epi, 0.01);
}

TEST(HeteroDecompose, Preconditions) {
  const std::vector<Distribution> mu{{1.0, 0.0}};
  const std::vector<Distribution> sigma{{1.0, 1.0}};
  const std::vector<Distribution> zero{{1.0, 0.0}};
  RngStream rng(1);
  EXPECT_THROW(hetero_decompose(mu, sigma, 10, rng), ArgumentError);
  EXPECT_NO_THROW(hetero_aleatoric(mu, sigma, 10, rng));
  EXPECT_THROW(hetero_aleatoric(mu, zero, 10, rng), DomainError);
  EXPECT_THROW(hetero_aleatoric(mu, sigma, 0, rng), ArgumentError);
}

TEST(Assess, HomoSamplesUseMutualInformationAndExpectedEntropy) {
  std::vector<Matrix> passes;
  RngStream rng(11);
  for (int t = 0; t < 4; ++t) {
    Matrix m(3, 2);
    for (Eigen::Index i = 0; i < 3; ++i) {
      const double p = rng.uniform();
      m(i, 0) = 1.0 - p;
      m(i, 1) = p;
    }
    passes.push_back(m);
  }
  const PredictiveSamples s(passes);
  const auto uq = assess_samples(s);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto per = s.instance(i);
    EXPECT_EQ(uq[i].epistemic, mutual_information(per));
    EXPECT_EQ(uq[i].aleatoric, expected_entropy(per));
  }
}

TEST(Assess, ParseNames) {
  EXPECT_EQ(parse_uq_method("mc-dropout"), UqMethod::McDropout);
  EXPECT_EQ(parse_uq_method("ensemble"), UqMethod::Ensemble);
  EXPECT_EQ(parse_uq_method("vanilla"), UqMethod::Vanilla);
  EXPECT_THROW(parse_uq_method("bayes"), ConfigError);
  EXPECT_EQ(parse_epistemic_source("mi"), EpistemicSource::MutualInformation);
}

}  // namespace
}  // namespace uqc
