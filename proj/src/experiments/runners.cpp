// SPDX-License-Identifier: Apache-2.0

#include "uqc/experiments/runners.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "uqc/errors.hpp"
#include "uqc/format.hpp"
#include "uqc/metrics/metrics.hpp"
#include "uqc/metrics/stats.hpp"
#include "uqc/parallel.hpp"

namespace uqc {

namespace {

constexpr std::uint64_t kSplitStream = 0x591;
constexpr std::uint64_t kBalanceStream = 0xBA1;
constexpr std::uint64_t kShiftStream = 0x5F7;
constexpr std::uint64_t kFitStream = 0xF17;
constexpr std::uint64_t kAssessStream = 0xA55;
constexpr std::uint64_t kSubsetStream = 0x5B5;

std::string context(std::string_view experiment, std::size_t repetition, const std::string& cell) {
  return std::string(experiment) + " experiment, repetition " + std::to_string(repetition) + cell + ": ";
}

// Re-raises training failures with the run they came from.
template <class Fn>
void with_context(const std::string& where, Fn&& fn) {
  try {
    fn();
  } catch (const DivergenceError& e) {
    throw DivergenceError(where + e.what(), e.epoch());
  } catch (const ConfigError& e) {
    throw ConfigError(where + e.what());
  }
}

Split experiment_split(const ExperimentSpec& spec, const Dataset& ds, std::uint64_t seed) {
  SplitSpec s = spec.split;
  s.seed = derive_seed(seed, kSplitStream);
  return split(ds, s);
}

std::vector<Distribution> mean_predictions(const std::vector<InstanceUq>& uq) {
  std::vector<Distribution> out;
  out.reserve(uq.size());
  for (const auto& u : uq) out.push_back(u.summary.p_bar);
  return out;
}

void put(std::ostream& out, double v) { write_double(out, v); }

}  // namespace

// ---- shift ----

ShiftResult run_shift_experiment(const ExperimentSpec& spec, const Dataset& ds) {
  const std::size_t n_int = spec.intensities.size();
  const std::size_t n_cells = spec.repetitions * n_int;
  const bool need_ensemble =
      std::find(spec.methods.begin(), spec.methods.end(), UqMethod::Ensemble) != spec.methods.end();
  UqModelConfig fit_config = spec.uq;
  fit_config.method = need_ensemble ? UqMethod::Ensemble : UqMethod::Vanilla;

  std::vector<std::vector<ShiftRun>> cells(n_cells);
  parallel_for(n_cells, [&](std::size_t c) {
    const std::size_t r = c / n_int;
    const double intensity = spec.intensities[c % n_int];
    const std::uint64_t seed = repetition_seed(spec, r);
    with_context(context("shift", r, ", intensity " + format_double(intensity)), [&] {
      const Split sp = experiment_split(spec, ds, seed);
      RngStream balance_rng(derive_seed(seed, kBalanceStream));
      Dataset train = undersample_balance(sp.train, balance_rng);
      Dataset val = sp.val;
      Dataset test = sp.test;
      const RngStream shift_rng(derive_seed(seed, kShiftStream));
      if (spec.shift_target != ShiftTarget::Test) {
        RngStream a = shift_rng.fork(1);
        RngStream b = shift_rng.fork(2);
        train = inject_shift(train, intensity, a);
        val = inject_shift(val, intensity, b);
      }
      if (spec.shift_target != ShiftTarget::Train) {
        RngStream t = shift_rng.fork(3);
        test = inject_shift(test, intensity, t);
      }
      const UqModel model = UqModel::fit(fit_config, train, val, derive_seed(seed, kFitStream));
      const Matrix x = test.feature_matrix();
      const std::vector<int> y = test.labels();
      for (std::size_t m = 0; m < spec.methods.size(); ++m) {
        RngStream rng(derive_seed(seed, kAssessStream, m));
        const auto uq = assess(model.networks(), spec.methods[m], x, spec.uq.mc_passes, spec.uq.source, rng);
        const EvalReport rep = classification_report(mean_predictions(uq), y);
        cells[c].push_back({r, seed, spec.methods[m], intensity, rep.f1, rep.brier});
      }
    });
  });

  ShiftResult result;
  for (std::size_t m = 0; m < spec.methods.size(); ++m) {
    for (std::size_t k = 0; k < n_int; ++k) {
      std::vector<double> f1;
      std::vector<double> br;
      for (std::size_t r = 0; r < spec.repetitions; ++r) {
        const ShiftRun& run = cells[r * n_int + k][m];
        f1.push_back(run.f1);
        br.push_back(run.brier);
      }
      result.summary.push_back(
          {spec.methods[m], spec.intensities[k], mean(f1), sample_std(f1), mean(br), sample_std(br), f1.size()});
    }
  }
  for (const auto& cell : cells) result.runs.insert(result.runs.end(), cell.begin(), cell.end());
  return result;
}

namespace {

template <class Get>
double trend(const std::vector<ShiftSummaryRow>& summary, UqMethod method, Get get) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& row : summary) {
    if (row.method != method) continue;
    x.push_back(row.intensity);
    y.push_back(get(row));
  }
  if (x.empty()) throw ArgumentError("method '" + std::string(to_string(method)) + "' is not in the result");
  return spearman_rho(x, y);
}

template <class Get>
double overall(const std::vector<ShiftRun>& runs, UqMethod method, Get get) {
  std::vector<double> v;
  for (const auto& run : runs) {
    if (run.method == method) v.push_back(get(run));
  }
  if (v.empty()) throw ArgumentError("method '" + std::string(to_string(method)) + "' is not in the result");
  return mean(v);
}

}  // namespace

double ShiftResult::trend_f1(UqMethod method) const {
  return trend(summary, method, [](const ShiftSummaryRow& r) { return r.mean_f1; });
}
double ShiftResult::trend_brier(UqMethod method) const {
  return trend(summary, method, [](const ShiftSummaryRow& r) { return r.mean_brier; });
}
double ShiftResult::overall_f1(UqMethod method) const {
  return overall(runs, method, [](const ShiftRun& r) { return r.f1; });
}
double ShiftResult::overall_brier(UqMethod method) const {
  return overall(runs, method, [](const ShiftRun& r) { return r.brier; });
}

// ---- data growth ----

std::vector<std::vector<std::size_t>> nested_balanced_subsets(const Dataset& train,
                                                               const std::vector<double>& fractions,
                                                               RngStream& rng) {
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < train.size(); ++i) by_class[static_cast<std::size_t>(train[i].label)].push_back(i);
  for (auto& v : by_class) rng.shuffle(std::span<std::size_t>(v));
  const std::size_t per_class = std::min(by_class[0].size(), by_class[1].size());
  if (per_class == 0) throw ConfigError("training partition lacks one of the classes");

  std::vector<std::vector<std::size_t>> out;
  for (double f : fractions) {
    const auto k = static_cast<std::size_t>(std::llround(f * static_cast<double>(per_class)));
    if (k == 0) throw ConfigError("growth fraction " + format_double(f) + " leaves no training instances");
    std::vector<std::size_t> idx;
    for (const auto& v : by_class) idx.insert(idx.end(), v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(idx.begin(), idx.end());
    out.push_back(std::move(idx));
  }
  return out;
}

GrowthResult run_data_growth_experiment(const ExperimentSpec& spec, const Dataset& ds) {
  if (spec.uq.model.head != Head::Heteroscedastic || spec.uq.method != UqMethod::Ensemble) {
    throw ConfigError("data-growth experiment needs model.head=hetero and uq.method=ensemble");
  }
  const std::size_t n_frac = spec.growth_fractions.size();
  std::vector<GrowthRun> runs(spec.repetitions * n_frac);
  parallel_for(runs.size(), [&](std::size_t c) {
    const std::size_t r = c / n_frac;
    const std::size_t k = c % n_frac;
    const double fraction = spec.growth_fractions[k];
    const std::uint64_t seed = repetition_seed(spec, r);
    with_context(context("data-growth", r, ", fraction " + format_double(fraction)), [&] {
      const Split sp = experiment_split(spec, ds, seed);
      RngStream subset_rng(derive_seed(seed, kSubsetStream));
      const auto subsets = nested_balanced_subsets(sp.train, spec.growth_fractions, subset_rng);
      const Dataset train = sp.train.subset(subsets[k], "growth");
      const UqModel model = UqModel::fit(spec.uq, train, sp.val, derive_seed(seed, kFitStream));
      RngStream rng(derive_seed(seed, kAssessStream));
      const auto uq = model.assess(sp.test.feature_matrix(), rng);
      double epi = 0.0;
      double ale = 0.0;
      for (const auto& u : uq) {
        epi += u.epistemic;
        ale += u.aleatoric;
      }
      const auto n = static_cast<double>(uq.size());
      runs[c] = {r, seed, fraction, train.size(), epi / n, ale / n};
    });
  });

  GrowthResult result;
  result.runs = runs;
  for (std::size_t k = 0; k < n_frac; ++k) {
    std::vector<double> epi;
    std::vector<double> ale;
    for (std::size_t r = 0; r < spec.repetitions; ++r) {
      epi.push_back(runs[r * n_frac + k].mean_epi);
      ale.push_back(runs[r * n_frac + k].mean_ale);
    }
    GrowthSummaryRow row{spec.growth_fractions[k], mean(epi), sample_std(epi), mean(ale), sample_std(ale), 0.0, 0.0,
                         epi.size()};
    if (k > 0) {
      const GrowthSummaryRow& prev = result.summary.back();
      row.delta_epi = prev.mean_epi > 0.0 ? 100.0 * (prev.mean_epi - row.mean_epi) / prev.mean_epi : 0.0;
      row.delta_ale = prev.mean_ale > 0.0 ? 100.0 * (prev.mean_ale - row.mean_ale) / prev.mean_ale : 0.0;
    }
    result.summary.push_back(row);
  }
  return result;
}

double GrowthResult::total_drop_epi() const {
  if (summary.empty() || summary.front().mean_epi <= 0.0) return 0.0;
  return 100.0 * (summary.front().mean_epi - summary.back().mean_epi) / summary.front().mean_epi;
}

double GrowthResult::total_drop_ale() const {
  if (summary.empty() || summary.front().mean_ale <= 0.0) return 0.0;
  return 100.0 * (summary.front().mean_ale - summary.back().mean_ale) / summary.front().mean_ale;
}

// ---- selector comparison ----

CompareResult run_selector_comparison(const ExperimentSpec& spec, const Dataset& ds) {
  CompareResult result;
  result.selectors = spec.selectors;
  for (std::size_t r = 0; r < spec.repetitions; ++r) result.seeds.push_back(repetition_seed(spec, r));
  const std::size_t n_sel = spec.selectors.size();
  result.runs.resize(spec.repetitions * n_sel);
  parallel_for(result.runs.size(), [&](std::size_t c) {
    const std::size_t r = c / n_sel;
    const Selector sel = spec.selectors[c % n_sel];
    with_context(context("selector-compare", r, ", selector " + std::string(to_string(sel))),
                 [&] { result.runs[c] = curation_loop(ds, sel, spec.loop, result.seeds[r]); });
  });

  for (std::size_t s = 0; s < n_sel; ++s) {
    const std::size_t rounds = result.runs[s].curve.size();
    for (std::size_t k = 0; k < rounds; ++k) {
      std::vector<double> f1;
      std::vector<double> epi;
      std::vector<double> ale;
      for (std::size_t r = 0; r < spec.repetitions; ++r) {
        const auto& curve = result.runs[r * n_sel + s].curve;
        if (k >= curve.size()) continue;
        f1.push_back(curve[k].f1);
        epi.push_back(curve[k].mean_epi);
        ale.push_back(curve[k].mean_ale);
      }
      const double sd = sample_std(f1);
      result.summary.push_back({spec.selectors[s], k, result.runs[s].curve[k].fraction_added, mean(f1), sd * sd, sd,
                                mean(epi), mean(ale), f1.size()});
    }
  }
  return result;
}

const CurationResult& CompareResult::run(std::size_t repetition, Selector selector) const {
  const auto it = std::find(selectors.begin(), selectors.end(), selector);
  if (it == selectors.end() || repetition >= seeds.size()) {
    throw ArgumentError("no run for selector '" + std::string(to_string(selector)) + "'");
  }
  return runs[repetition * selectors.size() + static_cast<std::size_t>(it - selectors.begin())];
}

std::vector<double> CompareResult::f1_at(Selector selector, double fraction_added) const {
  std::vector<double> out;
  for (std::size_t r = 0; r < seeds.size(); ++r) {
    for (const auto& row : run(r, selector).curve) {
      if (std::abs(row.fraction_added - fraction_added) < 1e-9) out.push_back(row.f1);
    }
  }
  return out;
}

// ---- CSV renderings ----

std::string shift_summary_csv(const ShiftResult& r) {
  std::ostringstream out;
  out << "method,intensity,mean_f1,std_f1,mean_brier,std_brier,n\n";
  for (const auto& row : r.summary) {
    out << to_string(row.method) << ',';
    put(out, row.intensity);
    for (double v : {row.mean_f1, row.std_f1, row.mean_brier, row.std_brier}) {
      out << ',';
      put(out, v);
    }
    out << ',' << row.n << '\n';
  }
  return out.str();
}

std::string shift_runs_csv(const ShiftResult& r) {
  std::ostringstream out;
  out << "repetition,seed,method,intensity,f1,brier\n";
  for (const auto& run : r.runs) {
    out << run.repetition << ',' << run.seed << ',' << to_string(run.method) << ',';
    put(out, run.intensity);
    out << ',';
    put(out, run.f1);
    out << ',';
    put(out, run.brier);
    out << '\n';
  }
  return out.str();
}

std::string growth_summary_csv(const GrowthResult& r) {
  std::ostringstream out;
  out << "fraction,mean_h_epi,std_h_epi,mean_h_ale,std_h_ale,delta_epi_pct,delta_ale_pct,n\n";
  for (const auto& row : r.summary) {
    put(out, row.fraction);
    for (double v : {row.mean_epi, row.std_epi, row.mean_ale, row.std_ale, row.delta_epi, row.delta_ale}) {
      out << ',';
      put(out, v);
    }
    out << ',' << row.n << '\n';
  }
  return out.str();
}

std::string growth_runs_csv(const GrowthResult& r) {
  std::ostringstream out;
  out << "repetition,seed,fraction,train_size,mean_h_epi,mean_h_ale\n";
  for (const auto& run : r.runs) {
    out << run.repetition << ',' << run.seed << ',';
    put(out, run.fraction);
    out << ',' << run.train_size << ',';
    put(out, run.mean_epi);
    out << ',';
    put(out, run.mean_ale);
    out << '\n';
  }
  return out.str();
}

std::string compare_summary_csv(const CompareResult& r) {
  std::ostringstream out;
  out << "selector,round,fraction_added,mean_f1,var_f1,std_f1,mean_epi,mean_ale,n\n";
  for (const auto& row : r.summary) {
    out << to_string(row.selector) << ',' << row.round << ',';
    put(out, row.fraction_added);
    for (double v : {row.mean_f1, row.var_f1, row.std_f1, row.mean_epi, row.mean_ale}) {
      out << ',';
      put(out, v);
    }
    out << ',' << row.n << '\n';
  }
  return out.str();
}

std::string compare_runs_csv(const CompareResult& r) {
  std::ostringstream out;
  out << "seed,round,fraction_added";
  for (Selector s : r.selectors) out << ",f1_" << to_string(s);
  out << '\n';
  for (std::size_t rep = 0; rep < r.seeds.size(); ++rep) {
    const auto& first = r.run(rep, r.selectors.front()).curve;
    for (std::size_t k = 0; k < first.size(); ++k) {
      out << r.seeds[rep] << ',' << k << ',';
      put(out, first[k].fraction_added);
      for (Selector s : r.selectors) {
        const auto& curve = r.run(rep, s).curve;
        out << ',';
        if (k < curve.size()) put(out, curve[k].f1);
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string compare_selection_csv(const CompareResult& r) {
  std::ostringstream out;
  out << "seed,selector,n_selected,noisy_fraction\n";
  for (std::size_t rep = 0; rep < r.seeds.size(); ++rep) {
    for (Selector s : r.selectors) {
      const auto& run = r.run(rep, s);
      out << r.seeds[rep] << ',' << to_string(s) << ',' << run.selected.size() << ',';
      if (run.noisy_selected_fraction) put(out, *run.noisy_selected_fraction);
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace uqc
