// SPDX-License-Identifier: Apache-2.0

#include "uqc/experiments/spec.hpp"

#include <array>
#include <cstdio>

#include "uqc/errors.hpp"

namespace uqc {

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Shift:
      return "shift";
    case ExperimentKind::DataGrowth:
      return "growth";
    case ExperimentKind::SelectorCompare:
      return "compare";
  }
  return "?";
}

std::string_view to_string(ShiftTarget target) {
  switch (target) {
    case ShiftTarget::Train:
      return "train";
    case ShiftTarget::Test:
      return "test";
    case ShiftTarget::Both:
      return "both";
  }
  return "?";
}

ShiftTarget parse_shift_target(std::string_view text) {
  if (text == "train") return ShiftTarget::Train;
  if (text == "test") return ShiftTarget::Test;
  if (text == "both") return ShiftTarget::Both;
  throw ConfigError("unknown shift target '" + std::string(text) + "' (expected train, test or both)");
}

std::span<const KeySpec> run_config_schema() {
  static const std::vector<KeySpec> schema = {
      {"data.path", "", "feature CSV to use instead of synthetic data (empty = synthetic)"},
      {"synthetic.n_instances", "2000", "number of synthetic instances"},
      {"synthetic.feature_dim", "20", "synthetic feature width"},
      {"synthetic.separation", "2.0", "distance between class means, in units of the cluster std"},
      {"synthetic.imbalance", "4.0", "negatives per positive"},
      {"synthetic.noisy_fraction", "0.3", "fraction of instances in the tagged noisy subset"},
      {"synthetic.flip_probability", "0.5", "label flip probability inside the noisy subset"},
      {"synthetic.noise_scale", "1.5", "std of the extra feature noise on noisy instances"},
      {"synthetic.seed", "1", "seed of the synthetic generator"},
      {"model.head", "hetero", "homo | hetero"},
      {"model.hidden_layers", "3", "number of hidden layers"},
      {"model.hidden_width", "300", "units per hidden layer"},
      {"model.dropout", "0.1", "dropout probability after every hidden layer"},
      {"model.learning_rate", "0.001", "Adam step size"},
      {"model.max_epochs", "200", "epoch cap"},
      {"model.patience", "5", "epochs without validation improvement before stopping"},
      {"model.batch_size", "64", "minibatch size"},
      {"model.s_logit", "50", "logit samples for the heteroscedastic loss and predictions"},
      {"uq.method", "ensemble", "vanilla | mc-dropout | ensemble"},
      {"uq.ensemble_size", "5", "ensemble members"},
      {"uq.mc_passes", "30", "stochastic passes for MC dropout"},
      {"uq.epistemic_source", "auto", "auto (H_epi/H_ale for hetero, MI/expected entropy for homo) | mi"},
      {"split.train_fraction", "0.8", "train+validation share; the rest is test"},
      {"split.val_fraction", "0.1", "validation share of the training partition"},
      {"experiment.seed", "0", "base seed of every repetition"},
      {"experiment.repetitions", "10", "independent repetitions"},
      {"experiment.intensities", "0,0.1,0.2,0.3,0.4", "shift intensities (feature noise std)"},
      {"experiment.methods", "vanilla,mc-dropout,ensemble", "UQ methods compared by the shift experiment"},
      {"experiment.shift_target", "both", "train | test | both"},
      {"experiment.growth_fractions", "0.6,0.8,1.0", "nested training fractions for the data-growth experiment"},
      {"experiment.selectors", "ehal,elah,random", "selectors compared by the curation experiment"},
      {"curation.seed_fraction", "0.2", "initial training share of the dataset"},
      {"curation.pool_fraction", "0.6", "candidate pool share of the dataset"},
      {"curation.tranche_fraction", "0.1", "instances added per round, as a share of the original pool"},
      {"curation.max_fraction", "1.0", "stop after this share of the pool has been added"},
      {"curation.max_rounds", "0", "cap on selection rounds (0 = none)"},
      {"curation.val_fraction", "0.1", "validation share of the current training set"},
      {"curation.n_ale", "0", "absolute aleatoric rejection-set size (0 = use curation.n_ale_fraction)"},
      {"curation.n_ale_fraction", "0.1", "rejection-set size as a share of the current pool (rounded up)"},
  };
  return schema;
}

KvConfig smoke_profile() {
  KvConfig raw;
  raw.set("synthetic.n_instances", "200");
  raw.set("experiment.repetitions", "1");
  return raw;
}

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

ExperimentSpec ExperimentSpec::from_config(const ResolvedConfig& config) {
  ExperimentSpec s;
  s.config = config;
  s.data_path = config.get("data.path");

  s.synthetic.n_instances = config.get_size("synthetic.n_instances");
  s.synthetic.feature_dim = config.get_size("synthetic.feature_dim");
  s.synthetic.separation = config.get_double("synthetic.separation");
  s.synthetic.imbalance = config.get_double("synthetic.imbalance");
  s.synthetic.noisy_fraction = config.get_double("synthetic.noisy_fraction");
  s.synthetic.flip_probability = config.get_double("synthetic.flip_probability");
  s.synthetic.noise_scale = config.get_double("synthetic.noise_scale");
  s.synthetic_seed = config.get_u64("synthetic.seed");
  s.synthetic.validate();

  ModelConfig& m = s.uq.model;
  m.input_dim = s.synthetic.feature_dim;
  m.head = parse_head(config.get("model.head"));
  m.hidden_layers = config.get_size("model.hidden_layers");
  m.hidden_width = config.get_size("model.hidden_width");
  m.dropout = config.get_double("model.dropout");
  m.adam.learning_rate = config.get_double("model.learning_rate");
  m.max_epochs = config.get_size("model.max_epochs");
  m.patience = config.get_size("model.patience");
  m.batch_size = config.get_size("model.batch_size");
  m.s_logit = config.get_size("model.s_logit");
  m.validate();

  s.uq.method = parse_uq_method(config.get("uq.method"));
  s.uq.ensemble_size = config.get_size("uq.ensemble_size");
  s.uq.mc_passes = config.get_size("uq.mc_passes");
  s.uq.source = parse_epistemic_source(config.get("uq.epistemic_source"));
  require(s.uq.ensemble_size >= 1, "uq.ensemble_size must be >= 1");
  require(s.uq.mc_passes >= 1, "uq.mc_passes must be >= 1");

  s.split.train_fraction = config.get_double("split.train_fraction");
  s.split.val_fraction = config.get_double("split.val_fraction");
  s.split.validate();

  s.seed = config.get_u64("experiment.seed");
  s.repetitions = config.get_size("experiment.repetitions");
  require(s.repetitions >= 1, "experiment.repetitions must be >= 1");
  s.intensities = config.get_double_list("experiment.intensities");
  require(!s.intensities.empty(), "experiment.intensities must not be empty");
  for (double v : s.intensities) require(v >= 0.0, "experiment.intensities must be >= 0");
  for (const auto& name : config.get_string_list("experiment.methods")) s.methods.push_back(parse_uq_method(name));
  require(!s.methods.empty(), "experiment.methods must not be empty");
  s.shift_target = parse_shift_target(config.get("experiment.shift_target"));
  s.growth_fractions = config.get_double_list("experiment.growth_fractions");
  require(!s.growth_fractions.empty(), "experiment.growth_fractions must not be empty");
  for (std::size_t i = 0; i < s.growth_fractions.size(); ++i) {
    const double f = s.growth_fractions[i];
    require(f > 0.0 && f <= 1.0, "experiment.growth_fractions must lie in (0, 1]");
    require(i == 0 || f > s.growth_fractions[i - 1], "experiment.growth_fractions must be increasing");
  }
  for (const auto& name : config.get_string_list("experiment.selectors")) s.selectors.push_back(parse_selector(name));
  require(!s.selectors.empty(), "experiment.selectors must not be empty");

  LoopConfig& l = s.loop;
  l.seed_fraction = config.get_double("curation.seed_fraction");
  l.pool_fraction = config.get_double("curation.pool_fraction");
  l.tranche_fraction = config.get_double("curation.tranche_fraction");
  l.max_fraction = config.get_double("curation.max_fraction");
  l.max_rounds = config.get_size("curation.max_rounds");
  l.val_fraction = config.get_double("curation.val_fraction");
  l.n_ale.absolute = config.get_size("curation.n_ale");
  l.n_ale.fraction = config.get_double("curation.n_ale_fraction");
  l.uq = s.uq;
  l.validate();
  return s;
}

ExperimentSpec ExperimentSpec::from_raw(const KvConfig& raw) {
  return from_config(ResolvedConfig::resolve(raw, run_config_schema()));
}

Dataset load_experiment_data(ExperimentSpec& spec) {
  Dataset ds;
  if (spec.data_path.empty()) {
    RngStream rng(spec.synthetic_seed);
    ds = generate_synthetic(spec.synthetic, rng);
  } else {
    ds = load_csv(spec.data_path);
  }
  spec.uq.model.input_dim = ds.feature_dim();
  spec.loop.uq.model.input_dim = ds.feature_dim();
  return ds;
}

std::uint64_t repetition_seed(const ExperimentSpec& spec, std::size_t r) {
  return derive_seed(spec.seed, 0x4E9, static_cast<std::uint64_t>(r));
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf.data());
}

}  // namespace uqc
