// SPDX-License-Identifier: Apache-2.0

#include "uqc/cli/cli.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "uqc/errors.hpp"
#include "uqc/experiments/outputs.hpp"
#include "uqc/experiments/runners.hpp"
#include "uqc/format.hpp"
#include "uqc/metrics/metrics.hpp"
#include "uqc/models/checkpoint.hpp"
#include "uqc/parallel.hpp"

namespace uqc {

namespace {

struct Flags {
  std::string config;
  std::string data;
  std::string out;
  std::string selector;
  std::string uq;
  std::string head;
  std::string profile = "standard";
  std::optional<std::uint64_t> seed;
  bool print_config = false;
};

KvConfig assemble_config(const Flags& f, const char* seed_key) {
  KvConfig raw;
  if (f.profile == "smoke") {
    raw = smoke_profile();
  } else if (f.profile != "standard") {
    throw ArgumentError("unknown profile '" + f.profile + "' (expected standard or smoke)");
  }
  if (!f.config.empty()) {
    const KvConfig file = load_run_config(f.config);
    for (const auto& [key, value] : file.entries()) raw.set(key, value);
  }
  if (!f.data.empty()) raw.set("data.path", f.data);
  if (!f.uq.empty()) raw.set("uq.method", f.uq);
  if (!f.head.empty()) raw.set("model.head", f.head);
  if (!f.selector.empty()) raw.set("experiment.selectors", f.selector);
  if (f.seed) raw.set(seed_key, std::to_string(*f.seed));
  return raw;
}

void print_resolved(const ExperimentSpec& spec, std::ostream& out) { out << spec.config.canonical(); }

std::filesystem::path require_out_dir(const Flags& f) {
  if (f.out.empty()) throw ArgumentError("--out is required");
  if (!std::filesystem::is_directory(f.out)) {
    throw ArgumentError("output directory '" + f.out + "' does not exist");
  }
  return f.out;
}

void add_common(CLI::App* cmd, Flags& f, bool with_data) {
  cmd->add_option("--config", f.config, "key=value run config, or a run manifest (.json) to rerun");
  if (with_data) cmd->add_option("--data", f.data, "feature CSV (id,f0..f{d-1},label[,noise_tag]); default synthetic");
  cmd->add_option("--seed", f.seed, "base seed (overrides the config)");
  cmd->add_option("--profile", f.profile, "standard | smoke (200 instances, 1 repetition)");
  cmd->add_flag("--print-config", f.print_config, "print the resolved config and exit without writing files");
}

void add_model_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--uq", f.uq, "vanilla | mc-dropout | ensemble");
  cmd->add_option("--head", f.head, "homo | hetero");
}

int cmd_gen_data(const Flags& f, std::ostream& out) {
  const ExperimentSpec spec = ExperimentSpec::from_raw(assemble_config(f, "synthetic.seed"));
  if (f.print_config) {
    print_resolved(spec, out);
    return kExitOk;
  }
  if (f.out.empty()) throw ArgumentError("--out is required");
  const std::filesystem::path path(f.out);
  const auto parent = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  if (!std::filesystem::is_directory(parent)) {
    throw ArgumentError("output directory '" + parent.string() + "' does not exist");
  }
  RngStream rng(spec.synthetic_seed);
  const Dataset ds = generate_synthetic(spec.synthetic, rng);
  save_csv(ds, path);
  out << "wrote " << ds.size() << " instances to " << path.string() << "\n";
  return kExitOk;
}

int cmd_train(const Flags& f, std::ostream& out) {
  ExperimentSpec spec = ExperimentSpec::from_raw(assemble_config(f, "experiment.seed"));
  if (f.print_config) {
    print_resolved(spec, out);
    return kExitOk;
  }
  const auto dir = require_out_dir(f);
  const Dataset ds = load_experiment_data(spec);
  const std::uint64_t seed = repetition_seed(spec, 0);
  SplitSpec ss = spec.split;
  ss.seed = derive_seed(seed, 0x591);
  const Split sp = split(ds, ss);
  RngStream balance_rng(derive_seed(seed, 0xBA1));
  const Dataset train = undersample_balance(sp.train, balance_rng);
  const UqModel model = UqModel::fit(spec.uq, train, sp.val, derive_seed(seed, 0xF17));
  RngStream rng(derive_seed(seed, 0xA55));
  const auto uq = model.assess(sp.test.feature_matrix(), rng);
  std::vector<Distribution> probs;
  double epi = 0.0;
  double ale = 0.0;
  for (const auto& u : uq) {
    probs.push_back(u.summary.p_bar);
    epi += u.epistemic;
    ale += u.aleatoric;
  }
  const EvalReport rep = classification_report(probs, sp.test.labels());

  const std::string stem = output_stem("train", spec.config);
  const auto model_path = dir / (stem + "-model.json");
  save_checkpoint(model.networks().members(), model_path);

  nlohmann::json report;
  report["tool"] = std::string(kToolVersion);
  report["config"] = nlohmann::json::object();
  for (const auto& [key, value] : spec.config.entries()) report["config"][key] = value;
  report["seed"] = seed;
  report["input_digest"] = input_digest(spec);
  report["sizes"] = {{"train", train.size()}, {"val", sp.val.size()}, {"test", sp.test.size()}};
  report["test"] = {{"f1", rep.f1},
                    {"brier", rep.brier},
                    {"precision", rep.precision},
                    {"recall", rep.recall},
                    {"tp", rep.tp},
                    {"fp", rep.fp},
                    {"fn", rep.fn},
                    {"tn", rep.tn},
                    {"mean_epistemic", epi / static_cast<double>(uq.size())},
                    {"mean_aleatoric", ale / static_cast<double>(uq.size())}};
  report["checkpoint"] = model_path.filename().string();
  const auto report_path = dir / (stem + "-report.json");
  std::ofstream rf(report_path);
  if (!rf) throw ArgumentError("cannot write '" + report_path.string() + "'");
  rf << report.dump(2) << "\n";

  out << "test f1=" << format_double(rep.f1) << " brier=" << format_double(rep.brier) << "\n";
  out << "wrote " << model_path.string() << "\n";
  out << "wrote " << report_path.string() << "\n";
  return kExitOk;
}

void announce(const WrittenOutputs& w, std::ostream& out) {
  for (const auto& p : w.tables) out << "wrote " << p.string() << "\n";
  out << "wrote " << w.manifest.string() << "\n";
}

int cmd_experiment(ExperimentKind kind, const Flags& f, std::ostream& out) {
  ExperimentSpec spec = ExperimentSpec::from_raw(assemble_config(f, "experiment.seed"));
  if (f.print_config) {
    print_resolved(spec, out);
    return kExitOk;
  }
  const auto dir = require_out_dir(f);
  const Dataset ds = load_experiment_data(spec);
  std::vector<std::uint64_t> seeds;
  for (std::size_t r = 0; r < spec.repetitions; ++r) seeds.push_back(repetition_seed(spec, r));
  std::vector<OutputTable> tables;
  switch (kind) {
    case ExperimentKind::Shift: {
      const ShiftResult r = run_shift_experiment(spec, ds);
      tables = {{"summary", shift_summary_csv(r)}, {"runs", shift_runs_csv(r)}};
      break;
    }
    case ExperimentKind::DataGrowth: {
      const GrowthResult r = run_data_growth_experiment(spec, ds);
      tables = {{"summary", growth_summary_csv(r)}, {"runs", growth_runs_csv(r)}};
      break;
    }
    case ExperimentKind::SelectorCompare: {
      const CompareResult r = run_selector_comparison(spec, ds);
      tables = {{"summary", compare_summary_csv(r)},
                {"runs", compare_runs_csv(r)},
                {"selection", compare_selection_csv(r)}};
      break;
    }
  }
  out << tables.front().csv;
  announce(write_outputs(to_string(kind), spec, seeds, tables, dir), out);
  return kExitOk;
}

struct ReportFlags {
  std::string data;
  std::string a;
  std::string b;
  std::string where;
};

int cmd_report(const ReportFlags& f, std::ostream& out) {
  std::string key;
  std::string value;
  if (!f.where.empty()) {
    const auto eq = f.where.find('=');
    if (eq == std::string::npos || eq == 0) throw ArgumentError("--where expects key=value");
    key = f.where.substr(0, eq);
    value = f.where.substr(eq + 1);
  }
  const ResultsTable table = load_results_table(f.data);
  const MannWhitneyResult r = compare_columns(table, f.a, f.b, key, value);
  out << "a=" << f.a << " n_a=" << r.n_a << "\n";
  out << "b=" << f.b << " n_b=" << r.n_b << "\n";
  out << "u_a=" << format_double(r.u_a) << "\n";
  out << "u_b=" << format_double(r.u_b) << "\n";
  out << "z=" << format_double(r.z) << "\n";
  out << "p_greater=" << format_double(r.p_greater) << "\n";
  return kExitOk;
}

std::optional<double> as_number(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::size_t ResultsTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  std::string msg = "no column '" + name + "'; columns:";
  for (const auto& h : header) msg += " " + h;
  throw ArgumentError(msg);
}

ResultsTable load_results_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  auto cells = [](const std::string& line) {
    std::vector<std::string> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(cell);
    if (!line.empty() && line.back() == ',') v.emplace_back();
    return v;
  };
  ResultsTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (t.header.empty()) {
      t.header = cells(line);
      continue;
    }
    auto row = cells(line);
    if (row.size() != t.header.size()) {
      throw ParseError(path.string() + ": line " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                       " cells, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw ParseError(path.string() + ": empty file");
  return t;
}

MannWhitneyResult compare_columns(const ResultsTable& table, const std::string& a, const std::string& b,
                                  const std::string& where_key, const std::string& where_value) {
  const std::size_t ia = table.column(a);
  const std::size_t ib = table.column(b);
  const std::optional<std::size_t> iw =
      where_key.empty() ? std::nullopt : std::optional<std::size_t>(table.column(where_key));
  const auto want = as_number(where_value);
  std::vector<double> va;
  std::vector<double> vb;
  for (const auto& row : table.rows) {
    if (iw) {
      const auto have = as_number(row[*iw]);
      const bool match = want && have ? *want == *have : row[*iw] == where_value;
      if (!match) continue;
    }
    auto take = [&](std::size_t col, std::vector<double>& dst) {
      if (row[col].empty()) return;
      const auto v = as_number(row[col]);
      if (!v) throw ParseError("column '" + table.header[col] + "': '" + row[col] + "' is not a number");
      dst.push_back(*v);
    };
    take(ia, va);
    take(ib, vb);
  }
  return mann_whitney_u(va, vb);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Uncertainty-driven training-data curation: train, assess and compare UQ classifiers."};
  app.footer(std::string("Environment:\n  ") + kThreadsEnvVar +
             "  worker threads for repetitions and ensemble members (default: all cores)\n"
             "Exit codes: 0 success, 1 runtime failure, 2 usage/config/input error.");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Flags flags;
  ReportFlags report;

  auto* gen = app.add_subcommand("gen-data", "generate the synthetic dataset as CSV");
  gen->add_option("--config", flags.config, "key=value run config (synthetic.* keys)");
  gen->add_option("--out", flags.out, "output CSV path (its directory must exist)");
  gen->add_option("--seed", flags.seed, "generator seed (overrides synthetic.seed)");
  gen->add_option("--profile", flags.profile, "standard | smoke");
  gen->add_flag("--print-config", flags.print_config, "print the resolved config and exit");

  auto* train = app.add_subcommand("train", "train one UQ model and report test metrics");
  add_common(train, flags, true);
  add_model_flags(train, flags);
  train->add_option("--out", flags.out, "existing output directory");

  std::vector<std::pair<CLI::App*, ExperimentKind>> experiments;
  const std::vector<std::tuple<const char*, const char*, ExperimentKind>> kinds = {
      {"shift", "F1/Brier per UQ method under growing feature-noise shift", ExperimentKind::Shift},
      {"growth", "epistemic vs aleatoric uncertainty over nested training fractions", ExperimentKind::DataGrowth},
      {"compare", "curation learning curves of the EHAL, ELAH and RANDOM selectors",
       ExperimentKind::SelectorCompare}};
  for (const auto& [name, help, kind] : kinds) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, flags, true);
    add_model_flags(cmd, flags);
    cmd->add_option("--out", flags.out, "existing output directory");
    if (kind == ExperimentKind::SelectorCompare) {
      cmd->add_option("--selector", flags.selector, "ehal | elah | random (default: all three)");
    }
    experiments.emplace_back(cmd, kind);
  }

  auto* rep = app.add_subcommand("report", "one-sided Mann-Whitney U test of column A > column B");
  rep->add_option("--data", report.data, "results CSV")->required();
  rep->add_option("--a", report.a, "column A")->required();
  rep->add_option("--b", report.b, "column B")->required();
  rep->add_option("--where", report.where, "keep rows whose KEY cell equals VALUE (key=value)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen_data(flags, out);
    if (*train) return cmd_train(flags, out);
    if (*rep) return cmd_report(report, out);
    for (const auto& [cmd, kind] : experiments) {
      if (*cmd) return cmd_experiment(kind, flags, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace uqc
