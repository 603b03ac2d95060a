// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "uqc/curation/loop.hpp"
#include "uqc/experiments/spec.hpp"

namespace uqc {

// Quality-shift response: for every repetition and intensity, split, balance,
// inject noise, train once and evaluate every configured UQ method on the
// test set. Noise draws and initial weights are shared across intensities
// within a repetition, so intensities differ only in the noise scale.
struct ShiftRun {
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  UqMethod method = UqMethod::Ensemble;
  double intensity = 0.0;
  double f1 = 0.0;
  double brier = 0.0;
};

struct ShiftSummaryRow {
  UqMethod method = UqMethod::Ensemble;
  double intensity = 0.0;
  double mean_f1 = 0.0;
  double std_f1 = 0.0;
  double mean_brier = 0.0;
  double std_brier = 0.0;
  std::size_t n = 0;
};

struct ShiftResult {
  std::vector<ShiftRun> runs;
  // Method-major, intensities in configured order.
  std::vector<ShiftSummaryRow> summary;

  // Spearman rho between intensity and the per-intensity mean metric.
  double trend_f1(UqMethod method) const;
  double trend_brier(UqMethod method) const;
  // Means over every intensity and repetition.
  double overall_f1(UqMethod method) const;
  double overall_brier(UqMethod method) const;
};

ShiftResult run_shift_experiment(const ExperimentSpec& spec, const Dataset& ds);

// Epistemic versus aleatoric uncertainty as training data grows: nested,
// class-balanced subsets of the training partition, one model per fraction,
// test-set mean uncertainties.
struct GrowthRun {
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  double fraction = 0.0;
  std::size_t train_size = 0;
  double mean_epi = 0.0;
  double mean_ale = 0.0;
};

struct GrowthSummaryRow {
  double fraction = 0.0;
  double mean_epi = 0.0;
  double std_epi = 0.0;
  double mean_ale = 0.0;
  double std_ale = 0.0;
  // Percent decrease relative to the previous fraction's mean (0 on the first row).
  double delta_epi = 0.0;
  double delta_ale = 0.0;
  std::size_t n = 0;
};

struct GrowthResult {
  std::vector<GrowthRun> runs;
  std::vector<GrowthSummaryRow> summary;

  // Percent decrease from the first to the last fraction.
  double total_drop_epi() const;
  double total_drop_ale() const;
};

// Indices (into `train`) of the nested balanced subsets, one per fraction.
std::vector<std::vector<std::size_t>> nested_balanced_subsets(const Dataset& train,
                                                               const std::vector<double>& fractions,
                                                               RngStream& rng);

GrowthResult run_data_growth_experiment(const ExperimentSpec& spec, const Dataset& ds);

// Curation loop per selector with seeds shared across selectors.
struct CompareSummaryRow {
  Selector selector = Selector::Ehal;
  std::size_t round = 0;
  double fraction_added = 0.0;
  double mean_f1 = 0.0;
  // Sample variance and std over repetitions.
  double var_f1 = 0.0;
  double std_f1 = 0.0;
  double mean_epi = 0.0;
  double mean_ale = 0.0;
  std::size_t n = 0;
};

struct CompareResult {
  std::vector<Selector> selectors;
  std::vector<std::uint64_t> seeds;
  // runs[r * selectors.size() + s].
  std::vector<CurationResult> runs;
  std::vector<CompareSummaryRow> summary;

  const CurationResult& run(std::size_t repetition, Selector selector) const;
  // F1 of each repetition at the given fraction added.
  std::vector<double> f1_at(Selector selector, double fraction_added) const;
};

CompareResult run_selector_comparison(const ExperimentSpec& spec, const Dataset& ds);

// Tidy CSV renderings.
std::string shift_summary_csv(const ShiftResult& r);
std::string shift_runs_csv(const ShiftResult& r);
std::string growth_summary_csv(const GrowthResult& r);
std::string growth_runs_csv(const GrowthResult& r);
std::string compare_summary_csv(const CompareResult& r);
// `seed,round,fraction_added,f1_<selector>...`
std::string compare_runs_csv(const CompareResult& r);
// `seed,selector,n_selected,noisy_fraction`
std::string compare_selection_csv(const CompareResult& r);

}  // namespace uqc
