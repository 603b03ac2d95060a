// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "uqc/nn/matrix.hpp"
#include "uqc/nn/rng.hpp"

namespace uqc {

// Uncertainty estimators over T weight samples of a two-class predictive
// distribution. All entropies are in nats with 0 log 0 := 0; all estimators
// are symmetric in the sample order.

// Arithmetic mean of the samples (the p-bar of the ensemble / MC passes).
Distribution mean_predictive(std::span<const Distribution> samples);

double predictive_entropy(const Distribution& p);

// Mean per-sample entropy: the aleatoric measure for single-head models.
double expected_entropy(std::span<const Distribution> samples);

// H(p-bar) - E[H(p_t)]: the epistemic measure for single-head models. Values
// in [-1e-9, 0) produced by rounding are clamped to 0.
double mutual_information(std::span<const Distribution> samples);

// Law of total variance on y ~ Bernoulli(p_t[1]):
//   aleatoric = mean_t p_t(1 - p_t), epistemic = population Var_t(p_t),
//   total = aleatoric + epistemic (= p-bar(1 - p-bar)).
struct VarianceDecomposition {
  double total = 0.0;
  double epistemic = 0.0;
  double aleatoric = 0.0;
};
VarianceDecomposition total_variance_decompose(std::span<const Distribution> samples);

// Dual-head decomposition from paired (mu_t, sigma_t). With
// mu-bar = mean mu_t, sigma-bar^2 = mean sigma_t^2 and s_epi^2 the
// population variance of mu_t per class:
//   p_ale = MC mean of softmax(mu-bar + sigma-bar * eps),
//   p_epi = MC mean of softmax(mu-bar + s_epi * eps),
// each over `s_logit` standard-normal draws, and H_* = entropy(p_*).
struct HeteroDecomposition {
  double h_ale = 0.0;
  double h_epi = 0.0;
  Distribution p_ale{};
  Distribution p_epi{};
};

// Requires T >= 2 (the epistemic branch needs a spread of mu).
HeteroDecomposition hetero_decompose(std::span<const Distribution> mu,
                                     std::span<const Distribution> sigma, std::size_t s_logit,
                                     RngStream& rng);

struct AleatoricOnly {
  double h_ale = 0.0;
  Distribution p_ale{};
};
// Aleatoric branch alone; valid for T >= 1.
AleatoricOnly hetero_aleatoric(std::span<const Distribution> mu, std::span<const Distribution> sigma,
                               std::size_t s_logit, RngStream& rng);

struct UqSummary {
  Distribution p_bar{};
  double h_total = 0.0;
  double h_expected = 0.0;
  double mutual_info = 0.0;
  std::optional<double> h_ale;
  std::optional<double> h_epi;
  double var_total = 0.0;
  double var_epistemic = 0.0;
  double var_aleatoric = 0.0;
};

UqSummary summarize(std::span<const Distribution> samples);

}  // namespace uqc
