// SPDX-License-Identifier: Apache-2.0

#include "uqc/uq/assess.hpp"

#include <iostream>
#include <string>

#include "uqc/errors.hpp"

namespace uqc {

std::string_view to_string(UqMethod method) {
  switch (method) {
    case UqMethod::Vanilla:
      return "vanilla";
    case UqMethod::McDropout:
      return "mc-dropout";
    case UqMethod::Ensemble:
      return "ensemble";
  }
  return "?";
}

UqMethod parse_uq_method(std::string_view text) {
  if (text == "vanilla") return UqMethod::Vanilla;
  if (text == "mc-dropout" || text == "mc_dropout" || text == "mcdropout") return UqMethod::McDropout;
  if (text == "ensemble") return UqMethod::Ensemble;
  throw ConfigError("unknown UQ method '" + std::string(text) +
                    "' (expected vanilla, mc-dropout or ensemble)");
}

std::string_view to_string(EpistemicSource source) {
  return source == EpistemicSource::Auto ? "auto" : "mi";
}

EpistemicSource parse_epistemic_source(std::string_view text) {
  if (text == "auto") return EpistemicSource::Auto;
  if (text == "mi") return EpistemicSource::MutualInformation;
  throw ConfigError("unknown epistemic source '" + std::string(text) + "' (expected auto or mi)");
}

std::vector<InstanceUq> assess_samples(const PredictiveSamples& samples) {
  std::vector<InstanceUq> out(samples.instances());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto per = samples.instance(i);
    out[i].summary = summarize(per);
    out[i].epistemic = out[i].summary.mutual_info;
    out[i].aleatoric = out[i].summary.h_expected;
  }
  return out;
}

std::vector<InstanceUq> assess_hetero(const HeteroSamples& raw, std::size_t s_logit,
                                      EpistemicSource source, RngStream& rng) {
  const PredictiveSamples samples = sampled_softmax(raw, s_logit, rng);
  std::vector<InstanceUq> out = assess_samples(samples);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto mu = raw.mu_of(i);
    const auto sigma = raw.sigma_of(i);
    UqSummary& s = out[i].summary;
    if (raw.passes() >= 2) {
      const HeteroDecomposition d = hetero_decompose(mu, sigma, s_logit, rng);
      s.h_ale = d.h_ale;
      s.h_epi = d.h_epi;
    } else {
      s.h_ale = hetero_aleatoric(mu, sigma, s_logit, rng).h_ale;
    }
    if (source == EpistemicSource::Auto) {
      out[i].epistemic = s.h_epi.value_or(0.0);
      out[i].aleatoric = *s.h_ale;
    }
  }
  return out;
}

std::uint64_t member_seed(std::uint64_t seed, std::size_t k) {
  return derive_seed(seed, 0xE5E, static_cast<std::uint64_t>(k));
}

std::vector<InstanceUq> assess(const Ensemble& models, UqMethod method, const Matrix& x,
                               std::size_t mc_passes, EpistemicSource source, RngStream& rng) {
  const MlpModel& first = models.member(0);
  const bool hetero = first.head() == Head::Heteroscedastic;
  switch (method) {
    case UqMethod::Vanilla:
      if (hetero) return assess_hetero(hetero_raw_outputs(first, x, 1, false, rng), first.config().s_logit, source, rng);
      return assess_samples(predict_vanilla(first, x, rng));
    case UqMethod::McDropout:
      if (hetero) {
        if (first.config().dropout == 0.0) {
          std::clog << "warning: mc-dropout with dropout probability 0; all passes are identical\n";
        }
        return assess_hetero(hetero_raw_outputs(first, x, mc_passes, true, rng), first.config().s_logit,
                             source, rng);
      }
      return assess_samples(predict_mc_dropout(first, x, mc_passes, rng));
    case UqMethod::Ensemble:
      if (hetero) return assess_hetero(hetero_raw_outputs(models, x), first.config().s_logit, source, rng);
      return assess_samples(predict_ensemble(models, x, rng));
  }
  throw ArgumentError("unknown UQ method");
}

UqModel UqModel::fit(const UqModelConfig& config, const Dataset& train_set, const Dataset& val_set,
                     std::uint64_t seed) {
  const std::size_t members = config.method == UqMethod::Ensemble ? config.ensemble_size : 1;
  if (members == 0) throw ConfigError("ensemble size must be >= 1");
  if (config.method == UqMethod::McDropout && config.mc_passes == 0) {
    throw ConfigError("mc-dropout: number of passes must be >= 1");
  }
  std::vector<std::uint64_t> seeds;
  for (std::size_t k = 0; k < members; ++k) seeds.push_back(member_seed(seed, k));
  return UqModel(config, train_ensemble(config.model, seeds, train_set, val_set));
}

std::vector<InstanceUq> UqModel::assess(const Matrix& x, RngStream& rng) const {
  return uqc::assess(networks_, config_.method, x, config_.mc_passes, config_.source, rng);
}

}  // namespace uqc
