// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uqc/data/dataset.hpp"
#include "uqc/models/mlp.hpp"
#include "uqc/nn/matrix.hpp"
#include "uqc/nn/rng.hpp"

namespace uqc {

// Members share one config and are seeded pairwise-distinct.
class Ensemble {
 public:
  explicit Ensemble(std::vector<MlpModel> members);

  std::size_t size() const { return members_.size(); }
  const std::vector<MlpModel>& members() const { return members_; }
  const MlpModel& member(std::size_t i) const { return members_[i]; }
  const ModelConfig& config() const { return members_.front().config(); }

 private:
  std::vector<MlpModel> members_;
};

// Trains one member per seed (share-nothing, possibly in parallel).
Ensemble train_ensemble(const ModelConfig& config, std::span<const std::uint64_t> seeds,
                        const Dataset& train_set, const Dataset& val_set);
// Train RNG of the member initialized from `member_seed`.
std::uint64_t member_train_seed(std::uint64_t member_seed);

// T weight samples of a two-class predictive distribution for N instances,
// stored pass-major: pass(t) is an N x 2 matrix.
class PredictiveSamples {
 public:
  PredictiveSamples() = default;
  explicit PredictiveSamples(std::vector<Matrix> passes);

  std::size_t passes() const { return passes_.size(); }
  std::size_t instances() const { return passes_.empty() ? 0 : static_cast<std::size_t>(passes_.front().rows()); }
  const Matrix& pass(std::size_t t) const { return passes_[t]; }
  // The T distributions of instance i, in pass order.
  std::vector<Distribution> instance(std::size_t i) const;

 private:
  std::vector<Matrix> passes_;
};

// Raw (mu, sigma) head outputs per weight sample, pass-major.
struct HeteroSamples {
  std::vector<Matrix> mu;
  std::vector<Matrix> sigma;

  std::size_t passes() const { return mu.size(); }
  std::size_t instances() const { return mu.empty() ? 0 : static_cast<std::size_t>(mu.front().rows()); }
  std::vector<Distribution> mu_of(std::size_t i) const;
  std::vector<Distribution> sigma_of(std::size_t i) const;
};

// Monte Carlo mean of softmax(mu + sigma * eps) over `s_logit` draws for every
// (pass, instance).
PredictiveSamples sampled_softmax(const HeteroSamples& raw, std::size_t s_logit, RngStream& rng);

// Eval-mode point prediction (one sample per instance). Heteroscedastic
// models average `config.s_logit` sampled softmaxes drawn from `rng`.
PredictiveSamples predict_vanilla(const MlpModel& model, const Matrix& x, RngStream& rng);

// T stochastic passes with dropout active; fresh masks per pass. Warns on
// stderr when the model has no dropout (all passes are then identical).
PredictiveSamples predict_mc_dropout(const MlpModel& model, const Matrix& x, std::size_t passes,
                                     RngStream& rng);

// One eval-mode sample per member, in member order.
PredictiveSamples predict_ensemble(const Ensemble& ensemble, const Matrix& x, RngStream& rng);

// Raw heteroscedastic outputs from T passes of one model (dropout active when
// `dropout_active`, eval mode otherwise).
HeteroSamples hetero_raw_outputs(const MlpModel& model, const Matrix& x, std::size_t passes,
                                 bool dropout_active, RngStream& rng);
HeteroSamples hetero_raw_outputs(const Ensemble& ensemble, const Matrix& x);

}  // namespace uqc
