// SPDX-License-Identifier: Apache-2.0

#include "uqc/curation/curation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "uqc/errors.hpp"
#include "uqc/nn/rng.hpp"

namespace uqc {

std::string_view to_string(Selector selector) {
  switch (selector) {
    case Selector::Ehal:
      return "ehal";
    case Selector::Elah:
      return "elah";
    case Selector::Random:
      return "random";
  }
  return "?";
}

Selector parse_selector(std::string_view text) {
  if (text == "ehal") return Selector::Ehal;
  if (text == "elah") return Selector::Elah;
  if (text == "random") return Selector::Random;
  throw ConfigError("unknown selector '" + std::string(text) + "' (expected ehal, elah or random)");
}

std::size_t NAleRule::resolve(std::size_t pool_size) const {
  if (absolute > 0) return absolute;
  const auto n = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(pool_size)));
  return std::max<std::size_t>(1, n);
}

void NAleRule::validate() const {
  if (absolute == 0 && !(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("n_ale fraction must lie in (0, 1] when no absolute count is given");
  }
}

namespace {

void require_nonempty(std::span<const UncertaintyRecord> pool, const char* what) {
  if (pool.empty()) throw ArgumentError(std::string(what) + ": empty pool");
}

void require_unique_ids(std::span<const UncertaintyRecord> pool) {
  std::unordered_set<std::string_view> seen;
  for (const auto& r : pool) {
    if (!seen.insert(r.id).second) throw ArgumentError("duplicate pool id '" + r.id + "'");
  }
}

// Strict weak order: `a` ranks ahead of `b` by value (descending when `high`)
// with ties going to the smaller id.
bool ranks_ahead(double va, const std::string& ida, double vb, const std::string& idb, bool high) {
  if (va != vb) return high ? va > vb : va < vb;
  return ida < idb;
}

std::vector<std::size_t> order_by(std::span<const UncertaintyRecord> pool, bool epistemic, bool high) {
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = epistemic ? pool[a].epistemic : pool[a].aleatoric;
    const double vb = epistemic ? pool[b].epistemic : pool[b].aleatoric;
    return ranks_ahead(va, pool[a].id, vb, pool[b].id, high);
  });
  return order;
}

// Fenwick tree of present/absent flags over aleatoric rank positions.
class PresenceTree {
 public:
  explicit PresenceTree(std::size_t n) : tree_(n + 1, 0) {
    for (std::size_t i = 1; i <= n; ++i) {
      tree_[i] += 1;
      const std::size_t parent = i + (i & (~i + 1));
      if (parent <= n) tree_[parent] += tree_[i];
    }
  }
  void remove(std::size_t pos) {
    for (std::size_t i = pos + 1; i < tree_.size(); i += i & (~i + 1)) --tree_[i];
  }
  // Present items at positions < pos.
  long long count_before(std::size_t pos) const {
    long long s = 0;
    for (std::size_t i = pos; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<long long> tree_;
};

SelectionTrace select_and_reject(std::span<const UncertaintyRecord> pool, std::size_t n_ale, bool high) {
  if (n_ale == 0) throw ArgumentError("n_ale must be >= 1");
  const auto epi_order = order_by(pool, true, high);
  const auto ale_order = order_by(pool, false, high);
  std::vector<std::size_t> ale_pos(pool.size());
  for (std::size_t k = 0; k < ale_order.size(); ++k) ale_pos[ale_order[k]] = k;

  PresenceTree present(pool.size());
  SelectionTrace trace;
  for (std::size_t idx : epi_order) {
    // Inside the rejection set iff fewer than n_ale present items rank ahead.
    if (present.count_before(ale_pos[idx]) < static_cast<long long>(n_ale)) {
      trace.rejected.push_back(pool[idx].id);
      present.remove(ale_pos[idx]);
      continue;
    }
    trace.chosen = pool[idx].id;
    return trace;
  }
  trace.exhausted = true;
  trace.chosen = pool[epi_order.front()].id;
  return trace;
}

}  // namespace

std::string top_one_by_epistemic(std::span<const UncertaintyRecord> pool) {
  require_nonempty(pool, "top_one_by_epistemic");
  std::size_t best = 0;
  for (std::size_t i = 1; i < pool.size(); ++i) {
    if (ranks_ahead(pool[i].epistemic, pool[i].id, pool[best].epistemic, pool[best].id, true)) best = i;
  }
  return pool[best].id;
}

std::vector<std::string> top_n_by_aleatoric(std::span<const UncertaintyRecord> pool, std::size_t n_ale) {
  if (n_ale == 0) throw ArgumentError("top_n_by_aleatoric: n_ale must be >= 1");
  const auto order = order_by(pool, false, true);
  std::vector<std::string> out;
  for (std::size_t k = 0; k < std::min(n_ale, order.size()); ++k) out.push_back(pool[order[k]].id);
  return out;
}

SelectionTrace ehal_trace(std::span<const UncertaintyRecord> pool, std::size_t n_ale) {
  require_nonempty(pool, "ehal_select_one");
  require_unique_ids(pool);
  return select_and_reject(pool, n_ale, true);
}

std::string ehal_select_one(std::span<const UncertaintyRecord> pool, std::size_t n_ale) {
  return ehal_trace(pool, n_ale).chosen;
}

SelectionTrace elah_trace(std::span<const UncertaintyRecord> pool, std::size_t n_ale) {
  require_nonempty(pool, "elah_select_one");
  require_unique_ids(pool);
  return select_and_reject(pool, n_ale, false);
}

std::string elah_select_one(std::span<const UncertaintyRecord> pool, std::size_t n_ale) {
  return elah_trace(pool, n_ale).chosen;
}

std::vector<std::string> curate(std::span<const UncertaintyRecord> pool, const CurationConfig& config) {
  config.n_ale.validate();
  if (config.n_to_select > pool.size()) {
    throw ArgumentError("curate: n_to_select exceeds the pool size");
  }
  require_unique_ids(pool);
  std::vector<UncertaintyRecord> remaining(pool.begin(), pool.end());
  std::vector<std::string> picked;
  picked.reserve(config.n_to_select);
  RngStream rng(config.seed);
  while (!remaining.empty() && picked.size() < config.n_to_select) {
    std::size_t at = 0;
    if (config.selector == Selector::Random) {
      at = rng.uniform_index(remaining.size());
    } else {
      const std::size_t n_ale = config.n_ale.resolve(remaining.size());
      const bool high = config.selector == Selector::Ehal;
      const std::string id = select_and_reject(remaining, n_ale, high).chosen;
      at = static_cast<std::size_t>(
          std::find_if(remaining.begin(), remaining.end(), [&](const auto& r) { return r.id == id; }) -
          remaining.begin());
    }
    picked.push_back(remaining[at].id);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(at));
  }
  return picked;
}

}  // namespace uqc
