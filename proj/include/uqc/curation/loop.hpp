// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uqc/curation/curation.hpp"
#include "uqc/data/dataset.hpp"
#include "uqc/uq/assess.hpp"

namespace uqc {

struct LoopConfig {
  // Initial training set and candidate pool as fractions of the dataset; the
  // remainder is the held-out test set.
  double seed_fraction = 0.2;
  double pool_fraction = 0.6;
  // Tranche size per round as a fraction of the original pool size.
  double tranche_fraction = 0.1;
  // Stop once this fraction of the original pool has been added (1 = run to
  // exhaustion). `max_rounds` > 0 additionally caps the number of selection rounds.
  double max_fraction = 1.0;
  std::size_t max_rounds = 0;
  // Validation hold-out carved from the current training set every round.
  double val_fraction = 0.1;
  NAleRule n_ale;
  UqModelConfig uq;

  void validate() const;
};

struct CurveRow {
  std::size_t round = 0;
  double fraction_added = 0.0;
  double f1 = 0.0;
  double mean_epi = 0.0;
  double mean_ale = 0.0;
  std::uint64_t seed = 0;
};

struct CurationResult {
  Selector selector = Selector::Ehal;
  std::uint64_t seed = 0;
  // Every selected id, in selection order.
  std::vector<std::string> selected;
  // Row 0 is the baseline trained on the seed set alone.
  std::vector<CurveRow> curve;
  // Share of selected instances carrying a true noise tag; empty when the
  // dataset has no tags or nothing was selected.
  std::optional<double> noisy_selected_fraction;
};

struct LoopPartition {
  Dataset seed_set;
  Dataset pool;
  Dataset test;
};

// Shuffled seed/pool/test partition; depends only on the dataset and seed.
LoopPartition partition_for_loop(const Dataset& ds, const LoopConfig& config, std::uint64_t seed);

// Train on the seed set, score the pool, move a tranche chosen by `selector`
// into the training set, retrain from scratch, and repeat. Everything except
// the selection itself is seeded from `seed` alone, so different selectors
// with the same seed share the seed set, test set and round-0 model.
CurationResult curation_loop(const Dataset& ds, Selector selector, const LoopConfig& config,
                             std::uint64_t seed);

void write_curve_csv(const CurationResult& result, std::ostream& out);

}  // namespace uqc
