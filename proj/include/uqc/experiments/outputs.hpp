// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "uqc/data/kv_config.hpp"
#include "uqc/experiments/spec.hpp"

namespace uqc {

struct OutputTable {
  // File suffix, e.g. "summary" -> <kind>-<hash>-summary.csv.
  std::string name;
  std::string csv;
};

struct WrittenOutputs {
  std::filesystem::path manifest;
  std::vector<std::filesystem::path> tables;
};

// Stem shared by every file of one run: <kind>-<16 hex digits of the config hash>.
std::string output_stem(std::string_view kind, const ResolvedConfig& config);

// Digest of the input data: FNV-1a of the CSV bytes, or of the synthetic
// spec when no file is used.
std::string input_digest(const ExperimentSpec& spec);

// Writes every table and a JSON manifest holding the resolved config, seeds,
// tool version, input digest, output names and a creation timestamp. The
// timestamp lives only in the manifest, so reruns produce identical tables.
// `out_dir` must exist (ArgumentError otherwise).
WrittenOutputs write_outputs(std::string_view kind, const ExperimentSpec& spec,
                             const std::vector<std::uint64_t>& run_seeds, const std::vector<OutputTable>& tables,
                             const std::filesystem::path& out_dir);

// The config recorded in a manifest, usable to rerun it.
KvConfig config_from_manifest(const std::filesystem::path& manifest);

// Loads `path` as a manifest when it ends in .json, else as a key=value file.
KvConfig load_run_config(const std::filesystem::path& path);

}  // namespace uqc
