// SPDX-License-Identifier: Apache-2.0

#include "uqc/curation/loop.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "uqc/errors.hpp"
#include "uqc/format.hpp"
#include "uqc/metrics/metrics.hpp"

namespace uqc {

namespace {

// Stream ids for the per-seed random streams of the loop.
constexpr std::uint64_t kPartitionStream = 0x9A27;
constexpr std::uint64_t kValSplitStream = 0x7A1;
constexpr std::uint64_t kBalanceStream = 0xBA1;
constexpr std::uint64_t kFitStream = 0xF17;
constexpr std::uint64_t kTestScoreStream = 0x7E57;
constexpr std::uint64_t kPoolScoreStream = 0x9001;
constexpr std::uint64_t kSelectStream = 0x5E1;

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

// Holds out a validation slice of the current training set and balances the rest.
std::pair<Dataset, Dataset> fit_split(const Dataset& train, double val_fraction, std::uint64_t seed,
                                      std::size_t round) {
  auto order = iota_indices(train.size());
  RngStream shuffle_rng(derive_seed(seed, kValSplitStream, round));
  shuffle_rng.shuffle(std::span<std::size_t>(order));
  std::size_t n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(train.size())));
  n_val = std::clamp<std::size_t>(n_val, 1, train.size() - 1);
  const std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> fit_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(fit_idx.begin(), fit_idx.end());
  Dataset fit = train.subset(fit_idx, train.provenance() + "/fit");
  Dataset val = train.subset(val_idx, train.provenance() + "/val");
  RngStream balance_rng(derive_seed(seed, kBalanceStream, round));
  return {undersample_balance(fit, balance_rng), std::move(val)};
}

double mean_of(const std::vector<InstanceUq>& uq, bool epistemic) {
  double s = 0.0;
  for (const auto& u : uq) s += epistemic ? u.epistemic : u.aleatoric;
  return uq.empty() ? 0.0 : s / static_cast<double>(uq.size());
}

}  // namespace

void LoopConfig::validate() const {
  auto in_open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!in_open_unit(seed_fraction) || !in_open_unit(pool_fraction) || seed_fraction + pool_fraction >= 1.0) {
    throw ConfigError("curation: seed and pool fractions must be positive and leave room for a test set");
  }
  if (!(tranche_fraction > 0.0 && tranche_fraction <= 1.0)) {
    throw ConfigError("curation: tranche fraction must lie in (0, 1]");
  }
  if (!(max_fraction > 0.0 && max_fraction <= 1.0)) {
    throw ConfigError("curation: max fraction must lie in (0, 1]");
  }
  if (!in_open_unit(val_fraction)) throw ConfigError("curation: validation fraction must lie in (0, 1)");
  n_ale.validate();
  uq.model.validate();
}

LoopPartition partition_for_loop(const Dataset& ds, const LoopConfig& config, std::uint64_t seed) {
  config.validate();
  const double n = static_cast<double>(ds.size());
  const auto n_seed = static_cast<std::size_t>(std::llround(config.seed_fraction * n));
  const auto n_pool = static_cast<std::size_t>(std::llround(config.pool_fraction * n));
  if (n_seed < 2 || n_pool < 1 || n_seed + n_pool >= ds.size()) {
    throw ConfigError("curation: dataset of " + std::to_string(ds.size()) +
                      " instances is too small for a seed/pool/test partition");
  }
  auto order = iota_indices(ds.size());
  RngStream rng(derive_seed(seed, kPartitionStream));
  rng.shuffle(std::span<std::size_t>(order));
  auto slice = [&](std::size_t from, std::size_t to, const char* name) {
    const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(from),
                                       order.begin() + static_cast<std::ptrdiff_t>(to));
    return ds.subset(idx, ds.provenance() + "/" + name);
  };
  return {slice(0, n_seed, "seed"), slice(n_seed, n_seed + n_pool, "pool"), slice(n_seed + n_pool, ds.size(), "test")};
}

CurationResult curation_loop(const Dataset& ds, Selector selector, const LoopConfig& config,
                             std::uint64_t seed) {
  LoopPartition part = partition_for_loop(ds, config, seed);
  if (part.seed_set.count_label(0) < 2 || part.seed_set.count_label(1) < 2) {
    throw ConfigError("curation: seed set needs at least two instances of each class (has " +
                      std::to_string(part.seed_set.count_label(0)) + " negatives, " +
                      std::to_string(part.seed_set.count_label(1)) + " positives)");
  }

  const std::size_t pool_size = part.pool.size();
  const auto tranche = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(config.tranche_fraction * static_cast<double>(pool_size) - 1e-9)));
  const Matrix test_x = part.test.feature_matrix();
  const std::vector<int> test_y = part.test.labels();

  CurationResult result;
  result.selector = selector;
  result.seed = seed;

  Dataset train = part.seed_set;
  Dataset pool = part.pool;
  std::size_t added = 0;
  std::size_t noisy = 0;
  for (std::size_t round = 0;; ++round) {
    auto [fit, val] = fit_split(train, config.val_fraction, seed, round);
    const UqModel model = UqModel::fit(config.uq, fit, val, derive_seed(seed, kFitStream, round));

    RngStream test_rng(derive_seed(seed, kTestScoreStream, round));
    const auto test_uq = model.assess(test_x, test_rng);
    std::vector<Distribution> probs;
    probs.reserve(test_uq.size());
    for (const auto& u : test_uq) probs.push_back(u.summary.p_bar);
    CurveRow row;
    row.round = round;
    row.fraction_added = static_cast<double>(added) / static_cast<double>(pool_size);
    row.f1 = classification_report(probs, test_y).f1;
    row.mean_epi = mean_of(test_uq, true);
    row.mean_ale = mean_of(test_uq, false);
    row.seed = seed;
    result.curve.push_back(row);

    const bool capped = config.max_rounds > 0 && round >= config.max_rounds;
    if (pool.empty() || row.fraction_added >= config.max_fraction - 1e-12 || capped) break;

    RngStream pool_rng(derive_seed(seed, kPoolScoreStream, round));
    const auto pool_uq = model.assess(pool.feature_matrix(), pool_rng);
    std::vector<UncertaintyRecord> records(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      records[i] = {pool[i].id, pool_uq[i].epistemic, pool_uq[i].aleatoric, pool_uq[i].summary.p_bar};
    }
    CurationConfig cc;
    cc.n_to_select = std::min(tranche, pool.size());
    cc.n_ale = config.n_ale;
    cc.selector = selector;
    cc.seed = derive_seed(seed, kSelectStream, round);
    const auto picked = curate(records, cc);

    std::unordered_map<std::string, std::size_t> where;
    for (std::size_t i = 0; i < pool.size(); ++i) where.emplace(pool[i].id, i);
    std::vector<std::size_t> picked_idx;
    std::unordered_set<std::size_t> taken;
    for (const auto& id : picked) {
      const std::size_t i = where.at(id);
      picked_idx.push_back(i);
      taken.insert(i);
      if (pool[i].noise_tag.value_or(false)) ++noisy;
    }
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (!taken.count(i)) rest.push_back(i);
    }
    train = Dataset::concat(train, pool.subset(picked_idx, "selected"), train.provenance());
    pool = pool.subset(rest, pool.provenance());
    result.selected.insert(result.selected.end(), picked.begin(), picked.end());
    added += picked.size();
  }
  if (ds.has_noise_tags() && !result.selected.empty()) {
    result.noisy_selected_fraction = static_cast<double>(noisy) / static_cast<double>(result.selected.size());
  }
  return result;
}

void write_curve_csv(const CurationResult& result, std::ostream& out) {
  out << "round,fraction_added,f1,mean_epi,mean_ale,seed\n";
  for (const auto& r : result.curve) {
    out << r.round << ',';
    write_double(out, r.fraction_added);
    out << ',';
    write_double(out, r.f1);
    out << ',';
    write_double(out, r.mean_epi);
    out << ',';
    write_double(out, r.mean_ale);
    out << ',' << r.seed << '\n';
  }
}

}  // namespace uqc
