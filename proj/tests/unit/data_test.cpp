// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "uqc/data/dataset.hpp"
#include "uqc/data/kv_config.hpp"
#include "uqc/errors.hpp"

namespace uqc {
namespace {

Dataset labelled(std::size_t n_neg, std::size_t n_pos) {
  std::vector<Instance> v;
  for (std::size_t i = 0; i < n_neg + n_pos; ++i) {
    v.push_back({"r" + std::to_string(i), {static_cast<double>(i)}, i < n_neg ? 0 : 1, std::nullopt});
  }
  return Dataset(std::move(v), 1);
}

SyntheticSpec small_spec() {
  SyntheticSpec s;
  s.n_instances = 500;
  s.feature_dim = 5;
  return s;
}

TEST(Csv, ParsesThreeRows) {
  std::istringstream in("id,f0,f1,label\na,0.5,-1,1\nb,2,3.25,0\nc,1e-3,0,1\n");
  const Dataset ds = parse_csv(in, "mem");
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.feature_dim(), 2u);
  EXPECT_EQ(ds[0].id, "a");
  EXPECT_EQ(ds[0].features, (std::vector<double>{0.5, -1.0}));
  EXPECT_EQ(ds[1].label, 0);
  EXPECT_EQ(ds[2].features[0], 1e-3);
  EXPECT_EQ(ds.count_label(1), 2u);
  EXPECT_FALSE(ds.has_noise_tags());
}

TEST(Csv, NoiseTagColumn) {
  std::istringstream in("id,f0,label,noise_tag\na,1,1,1\nb,2,0,0\n");
  const Dataset ds = parse_csv(in, "mem");
  EXPECT_TRUE(ds.has_noise_tags());
  EXPECT_TRUE(*ds[0].noise_tag);
  EXPECT_FALSE(*ds[1].noise_tag);
}

TEST(Csv, BadLabelNamesTheLine) {
  std::istringstream in("id,f0,label\na,1,0\nb,2,2\n");
  try {
    parse_csv(in, "bad.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Csv, MalformedInputs) {
  const std::vector<std::string> bad = {
      "",
      "id,x0,label\na,1,0\n",
      "id,f0,label\na,1\n",
      "id,f0,label\na,nan,0\n",
      "id,f0,label\na,abc,0\n",
      "id,f0,label\na,1,0\na,2,1\n",
      "id,f0,label\n,1,0\n",
  };
  for (const auto& text : bad) {
    std::istringstream in(text);
    EXPECT_THROW(parse_csv(in, "mem"), ParseError) << text;
  }
}

TEST(Csv, RoundTripIsBitExact) {
  RngStream rng(3);
  const Dataset ds = generate_synthetic(small_spec(), rng);
  std::ostringstream first;
  write_csv(ds, first);
  std::istringstream in(first.str());
  const Dataset back = parse_csv(in, "mem");
  ASSERT_EQ(back.size(), ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(back[i].id, ds[i].id);
    EXPECT_EQ(back[i].label, ds[i].label);
    EXPECT_EQ(back[i].noise_tag, ds[i].noise_tag);
    for (std::size_t c = 0; c < ds.feature_dim(); ++c) EXPECT_EQ(back[i].features[c], ds[i].features[c]);
  }
  std::ostringstream second;
  write_csv(back, second);
  EXPECT_EQ(first.str(), second.str());
}

TEST(Csv, FileRoundTripAndMissingFile) {
  const auto path = std::filesystem::temp_directory_path() / "uqc_data_test.csv";
  const Dataset ds = labelled(3, 2);
  save_csv(ds, path);
  const Dataset back = load_csv(path);
  EXPECT_EQ(back.ids(), ds.ids());
  std::filesystem::remove(path);
  EXPECT_THROW(load_csv(path), ParseError);
}

TEST(Dataset, ConstructionChecks) {
  std::vector<Instance> ragged{{"a", {1.0}, 0, std::nullopt}, {"b", {1.0, 2.0}, 1, std::nullopt}};
  EXPECT_ANY_THROW(Dataset(ragged, 1));
  std::vector<Instance> dup{{"a", {1.0}, 0, std::nullopt}, {"a", {2.0}, 1, std::nullopt}};
  EXPECT_THROW(Dataset(dup, 1), ArgumentError);
  std::vector<Instance> label{{"a", {1.0}, 3, std::nullopt}};
  EXPECT_ANY_THROW(Dataset(label, 1));
}

TEST(Split, SizesFollowRounding) {
  const Dataset ds = labelled(80, 20);
  const Split s = split(ds, SplitSpec{0.8, 0.1, 7});
  EXPECT_EQ(s.train.size(), 72u);
  EXPECT_EQ(s.val.size(), 8u);
  EXPECT_EQ(s.test.size(), 20u);
}

TEST(Split, DeterministicDisjointAndComplete) {
  const Dataset ds = labelled(80, 20);
  const Split a = split(ds, SplitSpec{0.8, 0.1, 7});
  const Split b = split(ds, SplitSpec{0.8, 0.1, 7});
  EXPECT_EQ(a.train.ids(), b.train.ids());
  EXPECT_EQ(a.val.ids(), b.val.ids());
  EXPECT_EQ(a.test.ids(), b.test.ids());
  std::set<std::string> all;
  for (const Dataset* part : {&a.train, &a.val, &a.test}) {
    for (const auto& id : part->ids()) EXPECT_TRUE(all.insert(id).second) << id;
  }
  EXPECT_EQ(all.size(), ds.size());
  const Split c = split(ds, SplitSpec{0.8, 0.1, 8});
  EXPECT_NE(a.train.ids(), c.train.ids());
}

TEST(Split, RejectsDegenerateInputs) {
  EXPECT_THROW(split(labelled(2, 1), SplitSpec{0.8, 0.1, 0}), ConfigError);
  EXPECT_THROW(split(labelled(80, 20), SplitSpec{1.0, 0.1, 0}), ConfigError);
  EXPECT_THROW(split(labelled(80, 20), SplitSpec{0.8, 0.0, 0}), ConfigError);
}

TEST(Balance, UndersamplesMajority) {
  RngStream rng(1);
  const Dataset b = undersample_balance(labelled(50, 10), rng);
  EXPECT_EQ(b.count_label(0), 10u);
  EXPECT_EQ(b.count_label(1), 10u);
  // Every minority instance survives and relative order is preserved.
  const auto ids = b.ids();
  for (std::size_t i = 50; i < 60; ++i) {
    EXPECT_NE(std::find(ids.begin(), ids.end(), "r" + std::to_string(i)), ids.end());
  }
  for (std::size_t i = 1; i < b.size(); ++i) EXPECT_LT(b[i - 1].features[0], b[i].features[0]);
}

TEST(Balance, MinorityNegativeAndAlreadyBalanced) {
  RngStream rng(2);
  const Dataset b = undersample_balance(labelled(5, 30), rng);
  EXPECT_EQ(b.count_label(0), 5u);
  EXPECT_EQ(b.count_label(1), 5u);
  const Dataset even = labelled(7, 7);
  EXPECT_EQ(undersample_balance(even, rng).ids(), even.ids());
  EXPECT_THROW(undersample_balance(labelled(4, 0), rng), ConfigError);
}

TEST(Shift, ZeroIntensityIsIdentity) {
  RngStream rng(4);
  const Dataset ds = generate_synthetic(small_spec(), rng);
  RngStream shift_rng(5);
  const Dataset same = inject_shift(ds, 0.0, shift_rng);
  for (std::size_t i = 0; i < ds.size(); ++i) EXPECT_EQ(same[i].features, ds[i].features);
  EXPECT_THROW(inject_shift(ds, -0.1, shift_rng), ArgumentError);
}

TEST(Shift, PerturbationHasRequestedScale) {
  std::vector<Instance> v;
  for (std::size_t i = 0; i < 2000; ++i) {
    v.push_back({"z" + std::to_string(i), std::vector<double>(50, 1.0), static_cast<int>(i % 2), std::nullopt});
  }
  const Dataset ds(std::move(v), 50);
  RngStream rng(6);
  const Dataset shifted = inject_shift(ds, 0.1, rng);
  double sum = 0.0;
  double sq = 0.0;
  double n = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(shifted[i].label, ds[i].label);
    EXPECT_EQ(shifted[i].id, ds[i].id);
    for (double f : shifted[i].features) {
      sum += f - 1.0;
      sq += (f - 1.0) * (f - 1.0);
      n += 1.0;
    }
  }
  const double m = sum / n;
  const double sd = std::sqrt(sq / n - m * m);
  EXPECT_NEAR(m, 0.0, 0.002);
  EXPECT_GE(sd, 0.098);
  EXPECT_LE(sd, 0.102);
}

TEST(Synthetic, ShapeTagsAndImbalance) {
  RngStream rng(7);
  SyntheticSpec spec = small_spec();
  spec.n_instances = 1001;
  const Dataset ds = generate_synthetic(spec, rng);
  EXPECT_EQ(ds.size(), 1001u);
  EXPECT_EQ(ds.feature_dim(), 5u);
  EXPECT_TRUE(ds.has_noise_tags());
  std::size_t tagged = 0;
  for (const auto& inst : ds.instances()) tagged += *inst.noise_tag ? 1 : 0;
  EXPECT_EQ(tagged, 300u);
  // Labels are assigned 1:4 before noise flips some of the noisy subset.
  std::size_t clean_pos = 0;
  std::size_t clean = 0;
  for (const auto& inst : ds.instances()) {
    if (!*inst.noise_tag) {
      ++clean;
      clean_pos += inst.label == 1 ? 1 : 0;
    }
  }
  EXPECT_NEAR(static_cast<double>(clean_pos) / static_cast<double>(clean), 0.2, 0.05);
}

TEST(Synthetic, DeterministicBySeed) {
  RngStream a(8);
  RngStream b(8);
  std::ostringstream sa;
  std::ostringstream sb;
  write_csv(generate_synthetic(small_spec(), a), sa);
  write_csv(generate_synthetic(small_spec(), b), sb);
  EXPECT_EQ(sa.str(), sb.str());
  RngStream c(9);
  std::ostringstream sc;
  write_csv(generate_synthetic(small_spec(), c), sc);
  EXPECT_NE(sa.str(), sc.str());
}

TEST(Synthetic, LargeSeparationIsLinearlySeparable) {
  SyntheticSpec spec = small_spec();
  spec.separation = 20.0;
  spec.noisy_fraction = 0.0;
  RngStream rng(10);
  const Dataset ds = generate_synthetic(spec, rng);
  // Nearest class centroid is a linear rule.
  std::vector<double> c0(spec.feature_dim, 0.0);
  std::vector<double> c1(spec.feature_dim, 0.0);
  for (const auto& inst : ds.instances()) {
    auto& c = inst.label == 1 ? c1 : c0;
    for (std::size_t j = 0; j < c.size(); ++j) c[j] += inst.features[j];
  }
  for (std::size_t j = 0; j < c0.size(); ++j) {
    c0[j] /= static_cast<double>(ds.count_label(0));
    c1[j] /= static_cast<double>(ds.count_label(1));
  }
  std::size_t correct = 0;
  for (const auto& inst : ds.instances()) {
    double d0 = 0.0;
    double d1 = 0.0;
    for (std::size_t j = 0; j < c0.size(); ++j) {
      d0 += (inst.features[j] - c0[j]) * (inst.features[j] - c0[j]);
      d1 += (inst.features[j] - c1[j]) * (inst.features[j] - c1[j]);
    }
    correct += ((d1 < d0 ? 1 : 0) == inst.label) ? 1 : 0;
  }
  EXPECT_EQ(correct, ds.size());
}

TEST(Synthetic, Validation) {
  RngStream rng(1);
  SyntheticSpec s = small_spec();
  s.noisy_fraction = 1.5;
  EXPECT_THROW(generate_synthetic(s, rng), ArgumentError);
  s = small_spec();
  s.feature_dim = 0;
  EXPECT_THROW(generate_synthetic(s, rng), ArgumentError);
}

const std::vector<KeySpec> kSchema = {
    {"a.x", "1", "an integer"},
    {"a.y", "0.5,1.5", "a list"},
    {"b.name", "hello", "a string"},
};

TEST(KvConfig, ParseResolveAndCanonical) {
  std::istringstream in("# comment\n\na.x = 42\n b.name=world \n");
  const KvConfig raw = KvConfig::parse(in, "cfg");
  const ResolvedConfig cfg = ResolvedConfig::resolve(raw, kSchema);
  EXPECT_EQ(cfg.get_u64("a.x"), 42u);
  EXPECT_EQ(cfg.get("b.name"), "world");
  EXPECT_EQ(cfg.get_double_list("a.y"), (std::vector<double>{0.5, 1.5}));
  EXPECT_EQ(cfg.canonical(), "a.x=42\na.y=0.5,1.5\nb.name=world\n");
}

TEST(KvConfig, Errors) {
  std::istringstream dup("a.x=1\na.x=2\n");
  EXPECT_THROW(KvConfig::parse(dup, "cfg"), ConfigError);
  std::istringstream noeq("a.x\n");
  EXPECT_THROW(KvConfig::parse(noeq, "cfg"), ConfigError);

  KvConfig unknown;
  unknown.set("a.z", "1");
  try {
    ResolvedConfig::resolve(unknown, kSchema);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("a.z"), std::string::npos);
    EXPECT_NE(msg.find("b.name"), std::string::npos);
  }

  KvConfig bad;
  bad.set("a.x", "-3");
  const ResolvedConfig cfg = ResolvedConfig::resolve(bad, kSchema);
  EXPECT_THROW(cfg.get_u64("a.x"), ConfigError);
  EXPECT_THROW(cfg.get_double("b.name"), ConfigError);
  EXPECT_THROW(cfg.get("nope"), ConfigError);
}

}  // namespace
}  // namespace uqc
