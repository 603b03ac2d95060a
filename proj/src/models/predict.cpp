// SPDX-License-Identifier: Apache-2.0

#include "uqc/models/predict.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <set>

#include "uqc/errors.hpp"
#include "uqc/parallel.hpp"

namespace uqc {

namespace {

void require_trained(const MlpModel& model) {
  if (!model.trained()) throw StateError("model has not been trained");
}

void require_hetero(const MlpModel& model) {
  if (model.head() != Head::Heteroscedastic) {
    throw HeadTypeError("raw (mu, sigma) outputs need a heteroscedastic model");
  }
}

Matrix predictive_from_outputs(const MlpModel& model, const HeadOutputs& out, RngStream& rng) {
  if (model.head() == Head::Homoscedastic) return softmax(out.logits);
  HeteroSamples one{{out.mu}, {out.sigma}};
  return sampled_softmax(one, model.config().s_logit, rng).pass(0);
}

}  // namespace

Ensemble::Ensemble(std::vector<MlpModel> members) : members_(std::move(members)) {
  if (members_.empty()) throw ArgumentError("ensemble needs at least one member");
  std::set<std::uint64_t> seeds;
  for (const MlpModel& m : members_) {
    const ModelConfig& a = m.config();
    const ModelConfig& b = members_.front().config();
    if (a.input_dim != b.input_dim || a.hidden_layers != b.hidden_layers ||
        a.hidden_width != b.hidden_width || a.head != b.head || a.dropout != b.dropout ||
        a.s_logit != b.s_logit) {
      throw ConfigError("ensemble members must share one model config");
    }
    seeds.insert(m.init_seed());
  }
  if (seeds.size() != members_.size()) {
    // Identically seeded members are allowed only as a degenerate check; warn.
    std::clog << "warning: ensemble members share init seeds; samples will coincide\n";
  }
}

std::uint64_t member_train_seed(std::uint64_t member_seed) {
  return derive_seed(member_seed, 0x7EA1);
}

Ensemble train_ensemble(const ModelConfig& config, std::span<const std::uint64_t> seeds,
                        const Dataset& train_set, const Dataset& val_set) {
  if (seeds.empty()) throw ConfigError("ensemble size must be >= 1");
  std::vector<std::optional<MlpModel>> slots(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    RngStream rng(member_train_seed(seeds[i]));
    slots[i] = train(MlpModel(config, seeds[i]), train_set, val_set, rng);
  });
  std::vector<MlpModel> members;
  members.reserve(slots.size());
  for (auto& s : slots) members.push_back(std::move(*s));
  return Ensemble(std::move(members));
}

PredictiveSamples::PredictiveSamples(std::vector<Matrix> passes) : passes_(std::move(passes)) {
  for (const Matrix& p : passes_) {
    if (p.cols() != static_cast<Eigen::Index>(kNumClasses) || p.rows() != passes_.front().rows()) {
      throw DimensionError("predictive samples must be N x 2 with a common N");
    }
  }
}

std::vector<Distribution> PredictiveSamples::instance(std::size_t i) const {
  std::vector<Distribution> out;
  out.reserve(passes_.size());
  for (const Matrix& p : passes_) out.push_back(row_distribution(p, static_cast<Eigen::Index>(i)));
  return out;
}

std::vector<Distribution> HeteroSamples::mu_of(std::size_t i) const {
  std::vector<Distribution> out;
  for (const Matrix& m : mu) out.push_back(row_distribution(m, static_cast<Eigen::Index>(i)));
  return out;
}

std::vector<Distribution> HeteroSamples::sigma_of(std::size_t i) const {
  std::vector<Distribution> out;
  for (const Matrix& s : sigma) out.push_back(row_distribution(s, static_cast<Eigen::Index>(i)));
  return out;
}

PredictiveSamples sampled_softmax(const HeteroSamples& raw, std::size_t s_logit, RngStream& rng) {
  if (s_logit == 0) throw ArgumentError("sampled_softmax: S_logit must be >= 1");
  std::vector<Matrix> passes;
  passes.reserve(raw.passes());
  for (std::size_t t = 0; t < raw.passes(); ++t) {
    const Matrix& mu = raw.mu[t];
    const Matrix& sigma = raw.sigma[t];
    Matrix probs = Matrix::Zero(mu.rows(), static_cast<Eigen::Index>(kNumClasses));
    for (Eigen::Index i = 0; i < mu.rows(); ++i) {
      double acc1 = 0.0;
      for (std::size_t s = 0; s < s_logit; ++s) {
        const double z0 = mu(i, 0) + sigma(i, 0) * rng.normal();
        const double z1 = mu(i, 1) + sigma(i, 1) * rng.normal();
        acc1 += softmax(Distribution{z0, z1})[1];
      }
      probs(i, 1) = acc1 / static_cast<double>(s_logit);
      probs(i, 0) = 1.0 - probs(i, 1);
    }
    passes.push_back(std::move(probs));
  }
  return PredictiveSamples(std::move(passes));
}

PredictiveSamples predict_vanilla(const MlpModel& model, const Matrix& x, RngStream& rng) {
  require_trained(model);
  return PredictiveSamples({predictive_from_outputs(model, model.infer(x, nullptr), rng)});
}

PredictiveSamples predict_mc_dropout(const MlpModel& model, const Matrix& x, std::size_t passes,
                                     RngStream& rng) {
  require_trained(model);
  if (passes == 0) throw ConfigError("mc-dropout: number of passes must be >= 1");
  if (model.config().dropout == 0.0) {
    std::clog << "warning: mc-dropout with dropout probability 0; all passes are identical\n";
  }
  std::vector<Matrix> out;
  out.reserve(passes);
  for (std::size_t t = 0; t < passes; ++t) {
    const HeadOutputs head = model.infer(x, &rng);
    out.push_back(predictive_from_outputs(model, head, rng));
  }
  return PredictiveSamples(std::move(out));
}

PredictiveSamples predict_ensemble(const Ensemble& ensemble, const Matrix& x, RngStream& rng) {
  std::vector<Matrix> out;
  out.reserve(ensemble.size());
  for (const MlpModel& m : ensemble.members()) {
    require_trained(m);
    out.push_back(predictive_from_outputs(m, m.infer(x, nullptr), rng));
  }
  return PredictiveSamples(std::move(out));
}

HeteroSamples hetero_raw_outputs(const MlpModel& model, const Matrix& x, std::size_t passes,
                                 bool dropout_active, RngStream& rng) {
  require_trained(model);
  require_hetero(model);
  if (passes == 0) throw ConfigError("hetero_raw_outputs: number of passes must be >= 1");
  HeteroSamples out;
  for (std::size_t t = 0; t < passes; ++t) {
    HeadOutputs head = model.infer(x, dropout_active ? &rng : nullptr);
    out.mu.push_back(std::move(head.mu));
    out.sigma.push_back(std::move(head.sigma));
  }
  return out;
}

HeteroSamples hetero_raw_outputs(const Ensemble& ensemble, const Matrix& x) {
  HeteroSamples out;
  for (const MlpModel& m : ensemble.members()) {
    require_trained(m);
    require_hetero(m);
    HeadOutputs head = m.infer(x, nullptr);
    out.mu.push_back(std::move(head.mu));
    out.sigma.push_back(std::move(head.sigma));
  }
  return out;
}

}  // namespace uqc
