// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "uqc/models/mlp.hpp"

namespace uqc {

inline constexpr int kCheckpointVersion = 1;

// Versioned JSON weight file holding one or more trained models. Doubles are
// written in shortest round-trip form, so save -> load is bit-exact.
void write_checkpoint(const std::vector<MlpModel>& models, std::ostream& out);
void save_checkpoint(const std::vector<MlpModel>& models, const std::filesystem::path& path);
std::vector<MlpModel> read_checkpoint(std::istream& in);
std::vector<MlpModel> load_checkpoint(const std::filesystem::path& path);

}  // namespace uqc
