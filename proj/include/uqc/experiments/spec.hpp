// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uqc/curation/loop.hpp"
#include "uqc/data/dataset.hpp"
#include "uqc/data/kv_config.hpp"
#include "uqc/uq/assess.hpp"

namespace uqc {

inline constexpr std::string_view kToolVersion = "uqcurate 0.1.0";

enum class ExperimentKind { Shift, DataGrowth, SelectorCompare };
std::string_view to_string(ExperimentKind kind);

// Which partitions receive quality-shift noise.
enum class ShiftTarget { Train, Test, Both };
std::string_view to_string(ShiftTarget target);
ShiftTarget parse_shift_target(std::string_view text);

// Every run-config key with its default; the defaults are the standard
// synthetic profile.
std::span<const KeySpec> run_config_schema();

// 200 instances, one repetition.
KvConfig smoke_profile();

struct ExperimentSpec {
  ResolvedConfig config;
  // Empty: generate the synthetic dataset.
  std::filesystem::path data_path;
  SyntheticSpec synthetic;
  std::uint64_t synthetic_seed = 1;
  UqModelConfig uq;
  SplitSpec split;
  std::uint64_t seed = 0;
  std::size_t repetitions = 10;
  std::vector<double> intensities;
  std::vector<UqMethod> methods;
  ShiftTarget shift_target = ShiftTarget::Both;
  std::vector<double> growth_fractions;
  std::vector<Selector> selectors;
  LoopConfig loop;

  // Throws ConfigError on malformed or out-of-range values.
  static ExperimentSpec from_config(const ResolvedConfig& config);
  static ExperimentSpec from_raw(const KvConfig& raw);
};

// The CSV at data_path, or the synthetic dataset. Also fixes the model input
// width to the dataset's feature width.
Dataset load_experiment_data(ExperimentSpec& spec);

// Seed of repetition r.
std::uint64_t repetition_seed(const ExperimentSpec& spec, std::size_t r);

// 64-bit FNV-1a, used for output names and input digests.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace uqc
