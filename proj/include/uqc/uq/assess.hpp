// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "uqc/data/dataset.hpp"
#include "uqc/models/mlp.hpp"
#include "uqc/models/predict.hpp"
#include "uqc/uq/uq.hpp"

namespace uqc {

enum class UqMethod { Vanilla, McDropout, Ensemble };

std::string_view to_string(UqMethod method);
// "vanilla", "mc-dropout", "ensemble".
UqMethod parse_uq_method(std::string_view text);

// Which pair of scalars feeds curation as (epistemic, aleatoric).
enum class EpistemicSource {
  // Heteroscedastic: (H_epi, H_ale); homoscedastic: (MI, expected entropy).
  Auto,
  // (MI, expected entropy) regardless of head.
  MutualInformation,
};

std::string_view to_string(EpistemicSource source);
EpistemicSource parse_epistemic_source(std::string_view text);

struct InstanceUq {
  UqSummary summary;
  double epistemic = 0.0;
  double aleatoric = 0.0;
};

// Per-instance summaries from homoscedastic predictive samples.
std::vector<InstanceUq> assess_samples(const PredictiveSamples& samples);

// Per-instance summaries from raw heteroscedastic samples. With a single
// weight sample the epistemic branch is undefined and reported as 0 (MI of
// one sample).
std::vector<InstanceUq> assess_hetero(const HeteroSamples& raw, std::size_t s_logit,
                                      EpistemicSource source, RngStream& rng);

struct UqModelConfig {
  ModelConfig model;
  UqMethod method = UqMethod::Ensemble;
  std::size_t ensemble_size = 5;
  std::size_t mc_passes = 30;
  EpistemicSource source = EpistemicSource::Auto;
};

// Member k of any model fitted from `seed` is initialized with member_seed(seed, k).
std::uint64_t member_seed(std::uint64_t seed, std::size_t k);

// Runs `method` on a trained ensemble. Vanilla and MC-dropout use member 0.
std::vector<InstanceUq> assess(const Ensemble& models, UqMethod method, const Matrix& x,
                               std::size_t mc_passes, EpistemicSource source, RngStream& rng);

// A trained UQ approximation: one network for vanilla/MC-dropout, T networks
// for the ensemble.
class UqModel {
 public:
  static UqModel fit(const UqModelConfig& config, const Dataset& train_set, const Dataset& val_set,
                     std::uint64_t seed);

  const UqModelConfig& config() const { return config_; }
  const Ensemble& networks() const { return networks_; }
  std::vector<InstanceUq> assess(const Matrix& x, RngStream& rng) const;

 private:
  UqModel(UqModelConfig config, Ensemble networks)
      : config_(std::move(config)), networks_(std::move(networks)) {}

  UqModelConfig config_;
  Ensemble networks_;
};

}  // namespace uqc
