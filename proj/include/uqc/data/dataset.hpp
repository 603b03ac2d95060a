// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uqc/nn/matrix.hpp"
#include "uqc/nn/rng.hpp"

namespace uqc {

// Label 1 is the positive (vulnerability-fixing) class, 0 the negative one.
struct Instance {
  std::string id;
  std::vector<double> features;
  int label = 0;
  // Ground-truth corruption marker; only synthetic data carries it.
  std::optional<bool> noise_tag;
};

// Immutable labeled collection. Construction validates that feature widths
// agree, features are finite, labels are binary and ids are unique.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<Instance> instances, std::size_t feature_dim, std::string provenance = {});
  // Infers the feature width from the first instance (instances must be nonempty).
  explicit Dataset(std::vector<Instance> instances, std::string provenance = {});

  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }
  std::size_t feature_dim() const { return feature_dim_; }
  const std::string& provenance() const { return provenance_; }
  const std::vector<Instance>& instances() const { return instances_; }
  const Instance& operator[](std::size_t i) const { return instances_[i]; }

  // True when every instance carries a noise tag.
  bool has_noise_tags() const;
  std::size_t count_label(int label) const;

  Matrix feature_matrix() const;
  std::vector<int> labels() const;
  std::vector<std::string> ids() const;

  // Instances at `indices`, in the given order.
  Dataset subset(std::span<const std::size_t> indices, std::string provenance) const;
  // Concatenation; feature widths must agree and ids stay unique.
  static Dataset concat(const Dataset& a, const Dataset& b, std::string provenance);

 private:
  std::vector<Instance> instances_;
  std::size_t feature_dim_ = 0;
  std::string provenance_;
};

// CSV contract: header `id,f0,...,f{d-1},label[,noise_tag]`, one instance per
// row, label in {0,1}, noise_tag in {0,1}, no empty cells. Floats are written
// in shortest round-trip form so save -> load is bit-exact.
Dataset parse_csv(std::istream& in, const std::string& source_name);
Dataset load_csv(const std::filesystem::path& path);
void write_csv(const Dataset& ds, std::ostream& out);
void save_csv(const Dataset& ds, const std::filesystem::path& path);

struct SplitSpec {
  double train_fraction = 0.8;
  // Fraction of the training partition held out for validation.
  double val_fraction = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Split {
  Dataset train;
  Dataset val;
  Dataset test;
};

// Deterministic shuffle by seed, then (train, val, test) with
// |train+val| = round(train_fraction * n) and |val| = round(val_fraction * |train+val|).
Split split(const Dataset& ds, const SplitSpec& spec);

// Undersamples the majority class without replacement down to the minority
// count. Relative instance order is preserved.
Dataset undersample_balance(const Dataset& train, RngStream& rng);

// Adds independent N(0, intensity^2) noise to every feature coordinate.
Dataset inject_shift(const Dataset& ds, double intensity, RngStream& rng);

// Two unit-variance Gaussian clusters at +-separation/2 along a random unit
// direction. A noisy subset of exactly floor(noisy_fraction * n) instances
// gets extra N(0, noise_scale^2) feature noise and label flips with
// probability flip_probability; those instances carry noise_tag = true.
struct SyntheticSpec {
  std::size_t n_instances = 2000;
  std::size_t feature_dim = 20;
  double separation = 2.0;
  // Negatives per positive.
  double imbalance = 4.0;
  double noisy_fraction = 0.3;
  double flip_probability = 0.5;
  double noise_scale = 1.5;

  void validate() const;
};

Dataset generate_synthetic(const SyntheticSpec& spec, RngStream& rng);

}  // namespace uqc
