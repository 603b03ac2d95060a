// SPDX-License-Identifier: Apache-2.0

#include "uqc/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "uqc/errors.hpp"

namespace uqc {

Dataset::Dataset(std::vector<Instance> instances, std::size_t feature_dim, std::string provenance)
    : instances_(std::move(instances)), feature_dim_(feature_dim), provenance_(std::move(provenance)) {
  std::unordered_set<std::string> seen;
  seen.reserve(instances_.size());
  for (const Instance& inst : instances_) {
    if (inst.features.size() != feature_dim_) {
      throw DimensionError("instance '" + inst.id + "' has " + std::to_string(inst.features.size()) +
                           " features, dataset expects " + std::to_string(feature_dim_));
    }
    for (double v : inst.features) {
      if (!std::isfinite(v)) throw DomainError("instance '" + inst.id + "' has a non-finite feature");
    }
    if (inst.label != 0 && inst.label != 1) {
      throw DomainError("instance '" + inst.id + "' has label " + std::to_string(inst.label));
    }
    if (!seen.insert(inst.id).second) throw ArgumentError("duplicate instance id '" + inst.id + "'");
  }
}

Dataset::Dataset(std::vector<Instance> instances, std::string provenance)
    : Dataset(instances, instances.empty() ? 0 : instances.front().features.size(),
              std::move(provenance)) {
  if (instances_.empty()) throw ArgumentError("cannot infer feature width of an empty dataset");
}

bool Dataset::has_noise_tags() const {
  return !instances_.empty() &&
         std::all_of(instances_.begin(), instances_.end(),
                     [](const Instance& i) { return i.noise_tag.has_value(); });
}

std::size_t Dataset::count_label(int label) const {
  return static_cast<std::size_t>(std::count_if(instances_.begin(), instances_.end(),
                                                [label](const Instance& i) { return i.label == label; }));
}

Matrix Dataset::feature_matrix() const {
  Matrix x(static_cast<Eigen::Index>(instances_.size()), static_cast<Eigen::Index>(feature_dim_));
  for (std::size_t r = 0; r < instances_.size(); ++r) {
    for (std::size_t c = 0; c < feature_dim_; ++c) {
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = instances_[r].features[c];
    }
  }
  return x;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(instances_.size());
  for (const Instance& i : instances_) out.push_back(i.label);
  return out;
}

std::vector<std::string> Dataset::ids() const {
  std::vector<std::string> out;
  out.reserve(instances_.size());
  for (const Instance& i : instances_) out.push_back(i.id);
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices, std::string provenance) const {
  std::vector<Instance> picked;
  picked.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= instances_.size()) throw ArgumentError("subset index out of range");
    picked.push_back(instances_[idx]);
  }
  return Dataset(std::move(picked), feature_dim_, std::move(provenance));
}

Dataset Dataset::concat(const Dataset& a, const Dataset& b, std::string provenance) {
  if (!a.empty() && !b.empty() && a.feature_dim() != b.feature_dim()) {
    throw DimensionError("concat: feature widths differ");
  }
  std::vector<Instance> all = a.instances();
  all.insert(all.end(), b.instances().begin(), b.instances().end());
  const std::size_t dim = a.empty() ? b.feature_dim() : a.feature_dim();
  return Dataset(std::move(all), dim, std::move(provenance));
}

void SplitSpec::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("split: train fraction must lie in (0, 1)");
  }
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ConfigError("split: validation fraction must lie in (0, 1)");
  }
}

Split split(const Dataset& ds, const SplitSpec& spec) {
  spec.validate();
  const std::size_t n = ds.size();
  const auto n_train_total = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::llround(spec.val_fraction * static_cast<double>(n_train_total)));
  if (n_train_total >= n || n_val == 0 || n_val >= n_train_total) {
    throw ConfigError("split: dataset of " + std::to_string(n) +
                      " instances is too small for a nonempty train/val/test partition");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RngStream rng(spec.seed);
  rng.shuffle(std::span<std::size_t>(order));

  const std::span<const std::size_t> all(order);
  const std::size_t n_train = n_train_total - n_val;
  return Split{
      ds.subset(all.subspan(0, n_train), ds.provenance() + "/train"),
      ds.subset(all.subspan(n_train, n_val), ds.provenance() + "/val"),
      ds.subset(all.subspan(n_train_total), ds.provenance() + "/test"),
  };
}

Dataset undersample_balance(const Dataset& train, RngStream& rng) {
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < train.size(); ++i) by_class[train[i].label].push_back(i);
  if (by_class[0].empty() || by_class[1].empty()) {
    throw ConfigError("undersample_balance: both classes must be present");
  }
  if (by_class[0].size() == by_class[1].size()) return train;

  const int majority = by_class[0].size() > by_class[1].size() ? 0 : 1;
  auto& major = by_class[majority];
  const std::size_t keep = by_class[1 - majority].size();
  rng.shuffle(std::span<std::size_t>(major));
  major.resize(keep);

  std::vector<std::size_t> kept = by_class[1 - majority];
  kept.insert(kept.end(), major.begin(), major.end());
  std::sort(kept.begin(), kept.end());
  return train.subset(kept, train.provenance() + "/balanced");
}

Dataset inject_shift(const Dataset& ds, double intensity, RngStream& rng) {
  if (!(intensity >= 0.0)) throw ArgumentError("inject_shift: intensity must be nonnegative");
  if (intensity == 0.0) return ds;
  std::vector<Instance> shifted = ds.instances();
  for (Instance& inst : shifted) {
    for (double& v : inst.features) v += intensity * rng.normal();
  }
  return Dataset(std::move(shifted), ds.feature_dim(), ds.provenance() + "/shifted");
}

void SyntheticSpec::validate() const {
  if (n_instances < 2) throw ArgumentError("synthetic: need at least two instances");
  if (feature_dim == 0) throw ArgumentError("synthetic: feature_dim must be positive");
  if (!(separation >= 0.0)) throw ArgumentError("synthetic: separation must be nonnegative");
  if (!(imbalance > 0.0)) throw ArgumentError("synthetic: imbalance must be positive");
  if (!(noisy_fraction >= 0.0 && noisy_fraction <= 1.0)) {
    throw ArgumentError("synthetic: noisy_fraction must lie in [0, 1]");
  }
  if (!(flip_probability >= 0.0 && flip_probability <= 1.0)) {
    throw ArgumentError("synthetic: flip_probability must lie in [0, 1]");
  }
  if (!(noise_scale >= 0.0)) throw ArgumentError("synthetic: noise_scale must be nonnegative");
}

Dataset generate_synthetic(const SyntheticSpec& spec, RngStream& rng) {
  spec.validate();
  const std::size_t n = spec.n_instances;
  const std::size_t d = spec.feature_dim;

  std::vector<double> direction(d);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& v : direction) {
      v = rng.normal();
      norm += v * v;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& v : direction) v /= norm;

  auto n_pos = static_cast<std::size_t>(std::llround(static_cast<double>(n) / (1.0 + spec.imbalance)));
  n_pos = std::clamp<std::size_t>(n_pos, 1, n - 1);
  std::vector<int> labels(n, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_pos), 1);
  rng.shuffle(std::span<int>(labels));

  const std::size_t width = std::to_string(n - 1).size();
  std::vector<Instance> instances(n);
  for (std::size_t i = 0; i < n; ++i) {
    Instance& inst = instances[i];
    std::string digits = std::to_string(i);
    inst.id = "syn-" + std::string(width - digits.size(), '0') + digits;
    inst.label = labels[i];
    inst.noise_tag = false;
    const double offset = (inst.label == 1 ? 0.5 : -0.5) * spec.separation;
    inst.features.resize(d);
    for (std::size_t c = 0; c < d; ++c) inst.features[c] = offset * direction[c] + rng.normal();
  }

  const auto n_noisy = static_cast<std::size_t>(std::floor(spec.noisy_fraction * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  for (std::size_t k = 0; k < n_noisy; ++k) {
    Instance& inst = instances[order[k]];
    inst.noise_tag = true;
    for (double& v : inst.features) v += spec.noise_scale * rng.normal();
    if (rng.bernoulli(spec.flip_probability)) inst.label = 1 - inst.label;
  }
  return Dataset(std::move(instances), d, "synthetic");
}

}  // namespace uqc
