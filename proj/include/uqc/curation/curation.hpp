// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uqc/nn/matrix.hpp"

namespace uqc {

struct UncertaintyRecord {
  std::string id;
  double epistemic = 0.0;
  double aleatoric = 0.0;
  Distribution p_bar{0.5, 0.5};
};

enum class Selector { Ehal, Elah, Random };

std::string_view to_string(Selector selector);
Selector parse_selector(std::string_view text);

// Size of the aleatoric rejection set. A positive `absolute` wins; otherwise
// ceil(fraction * pool size), at least 1.
struct NAleRule {
  std::size_t absolute = 0;
  double fraction = 0.1;

  std::size_t resolve(std::size_t pool_size) const;
  void validate() const;
};

// Ties on uncertainty values are broken by lexicographically smaller id.

// Id with the largest epistemic value.
std::string top_one_by_epistemic(std::span<const UncertaintyRecord> pool);

// The min(n_ale, |pool|) ids with the largest aleatoric values, largest first.
std::vector<std::string> top_n_by_aleatoric(std::span<const UncertaintyRecord> pool, std::size_t n_ale);

struct SelectionTrace {
  std::string chosen;
  // Candidates rejected (in order) for sitting in the aleatoric rejection set.
  std::vector<std::string> rejected;
  // Every candidate was rejected; `chosen` fell back to the first candidate.
  bool exhausted = false;
};

// Epistemic-high / aleatoric-low: repeatedly take the top-epistemic
// candidate of the current view and drop it while it lies in the view's
// top-n_ale aleatoric set. If the view empties, the globally top-epistemic
// id is returned.
SelectionTrace ehal_trace(std::span<const UncertaintyRecord> pool, std::size_t n_ale);
std::string ehal_select_one(std::span<const UncertaintyRecord> pool, std::size_t n_ale);

// Mirror heuristic: lowest epistemic first, rejected while in the view's
// bottom-n_ale aleatoric set; falls back to the globally lowest epistemic.
SelectionTrace elah_trace(std::span<const UncertaintyRecord> pool, std::size_t n_ale);
std::string elah_select_one(std::span<const UncertaintyRecord> pool, std::size_t n_ale);

struct CurationConfig {
  std::size_t n_to_select = 0;
  NAleRule n_ale;
  Selector selector = Selector::Ehal;
  // Drives RANDOM only.
  std::uint64_t seed = 0;
};

// Applies the selector until n ids are picked or the pool is exhausted,
// removing each pick before the next one. n_ale is recomputed from the
// remaining pool size before every pick.
std::vector<std::string> curate(std::span<const UncertaintyRecord> pool, const CurationConfig& config);

}  // namespace uqc
