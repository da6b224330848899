// Copyright 2026 The PVisRec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "pvis/corpus.hpp"
#include "pvis/synth.hpp"

namespace pvis {
namespace {

constexpr const char* kMinimal = R"({
  "datasets": [{"id": 7, "columns": [
      {"name": "a", "values": [1.5, 2.0, 3.7]},
      {"name": "b", "values": [0.1, 0.2, 9.25]}]}],
  "visualizations": [
      {"user": 0, "dataset": 7, "attrs": [0, 1],
       "channels": {"mark": "scatter", "x": 0, "y": 1}, "feedback": "generated"}]
})";

std::vector<Cell> cells(std::initializer_list<Cell> c) { return std::vector<Cell>(c); }

TEST(LoadCorpus, MinimalFile) {
  const Corpus c = corpus_from_json_text(kMinimal);
  EXPECT_EQ(c.num_users, 1);
  EXPECT_EQ(c.num_attributes(), 2u);
  EXPECT_EQ(c.num_configs(), 1u);
  EXPECT_EQ(c.attribute(1).name, "b");
  EXPECT_EQ(c.attribute(1).dataset_id, 7);
}

TEST(LoadCorpus, LoadsFromDisk) {
  const auto path = std::filesystem::temp_directory_path() / "pvis_minimal_corpus.json";
  {
    std::ofstream out(path);
    out << kMinimal;
  }
  const Corpus c = load_corpus(path.string());
  EXPECT_EQ(c.visualizations.size(), 1u);
  std::filesystem::remove(path);
  EXPECT_THROW(load_corpus(path.string()), ParseError);
}

TEST(LoadCorpus, AttributeOutsideDatasetIsValidationError) {
  const char* text = R"({
    "datasets": [{"id": 0, "columns": [{"name": "a", "values": [1, 2]}]},
                 {"id": 1, "columns": [{"name": "b", "values": [1, 2]}]}],
    "visualizations": [{"user": 0, "dataset": 0, "attrs": [1],
                        "channels": {"mark": "bar", "x": 1}}]})";
  EXPECT_THROW(corpus_from_json_text(text), ValidationError);
}

TEST(LoadCorpus, DanglingDatasetIsValidationError) {
  const char* text = R"({
    "datasets": [{"id": 0, "columns": [{"name": "a", "values": [1, 2]}]}],
    "visualizations": [{"user": 0, "dataset": 3, "attrs": [0],
                        "channels": {"mark": "bar", "x": 0}}]})";
  EXPECT_THROW(corpus_from_json_text(text), ValidationError);
}

TEST(LoadCorpus, MalformedJsonReportsLine) {
  const char* text = "{\n  \"datasets\": [\n  oops\n]}";
  try {
    corpus_from_json_text(text);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(LoadCorpus, MissingFieldNamesRecord) {
  const char* text = R"({"datasets": [{"id": 0, "columns": [{"name": "a"}]}], "visualizations": []})";
  try {
    corpus_from_json_text(text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("datasets[0].columns[0]"), std::string::npos) << e.what();
  }
}

TEST(LoadCorpus, UnknownChannelRejected) {
  const char* text = R"({
    "datasets": [{"id": 0, "columns": [{"name": "a", "values": [1, 2]}]}],
    "visualizations": [{"user": 0, "dataset": 0, "attrs": [0],
                        "channels": {"mark": "bar", "x": 0, "opacity": 0.5}}]})";
  EXPECT_THROW(corpus_from_json_text(text), ValidationError);
}

TEST(LoadCorpus, UnboundListedAttributeRejected) {
  const char* text = R"({
    "datasets": [{"id": 0, "columns": [{"name": "a", "values": [1, 2]}, {"name": "b", "values": [1, 2]}]}],
    "visualizations": [{"user": 0, "dataset": 0, "attrs": [0, 1],
                        "channels": {"mark": "bar", "x": 0}}]})";
  EXPECT_THROW(corpus_from_json_text(text), ValidationError);
}

TEST(LoadCorpus, AttributesNormalizedToChannelOrder) {
  const char* text = R"({
    "datasets": [{"id": 0, "columns": [{"name": "a", "values": [1.5, 2]}, {"name": "b", "values": [1.5, 2]}]}],
    "visualizations": [{"user": 0, "dataset": 0, "attrs": [0, 1],
                        "channels": {"mark": "scatter", "x": 1, "y": 0}}]})";
  const Corpus c = corpus_from_json_text(text);
  EXPECT_EQ(c.visualizations[0].attribute_ids, (std::vector<int>{1, 0}));
}

TEST(LoadCorpus, SyntheticRoundTripIsIdentical) {
  const Corpus original = generate_synthetic_corpus(3, 12, 8, 5, 2);
  const auto path = std::filesystem::temp_directory_path() / "pvis_roundtrip.json";
  save_corpus(original, path.string());
  const Corpus loaded = load_corpus(path.string());
  std::filesystem::remove(path);
  // Field-by-field structural equality.
  ASSERT_EQ(loaded.num_users, original.num_users);
  ASSERT_EQ(loaded.datasets.size(), original.datasets.size());
  for (std::size_t d = 0; d < original.datasets.size(); ++d) {
    ASSERT_EQ(loaded.datasets[d].columns.size(), original.datasets[d].columns.size());
    for (std::size_t c = 0; c < original.datasets[d].columns.size(); ++c)
      EXPECT_EQ(loaded.datasets[d].columns[c], original.datasets[d].columns[c]);
  }
  ASSERT_EQ(loaded.visualizations.size(), original.visualizations.size());
  for (std::size_t v = 0; v < original.visualizations.size(); ++v)
    EXPECT_EQ(loaded.visualizations[v], original.visualizations[v]) << v;
  EXPECT_TRUE(loaded.registry == original.registry);
  EXPECT_TRUE(loaded == original);
}

TEST(InferType, Examples) {
  EXPECT_EQ(infer_attribute_type(cells({1.5, 2.0, 3.7})), AttributeType::quantitative);
  EXPECT_EQ(infer_attribute_type(cells({std::string("2021-01-02"), std::string("2021-03-04")})),
            AttributeType::temporal);
  EXPECT_EQ(infer_attribute_type(cells({std::string("red"), std::string("blue"), std::string("red")})),
            AttributeType::nominal);
}

TEST(InferType, RuleTableEdges) {
  // small non-negative integer cardinality -> ordinal
  EXPECT_EQ(infer_attribute_type(cells({1.0, 2.0, 3.0, 2.0})), AttributeType::ordinal);
  EXPECT_EQ(infer_attribute_type(cells({-1.0, 2.0, 3.0})), AttributeType::quantitative);
  std::vector<Cell> many;
  for (int i = 0; i < 11; ++i) many.emplace_back(static_cast<double>(i));
  EXPECT_EQ(infer_attribute_type(many), AttributeType::quantitative);
  // numeric strings count as numbers; missing cells are ignored
  EXPECT_EQ(infer_attribute_type(cells({std::string("1.25"), std::monostate{}, 3.5})),
            AttributeType::quantitative);
  // epoch seconds
  std::vector<Cell> epoch;
  for (int i = 0; i < 20; ++i) epoch.emplace_back(1600000000.0 + 86400.0 * i);
  EXPECT_EQ(infer_attribute_type(epoch), AttributeType::temporal);
  EXPECT_EQ(infer_attribute_type(cells({std::string("2021-01-02T10:20:30Z")})), AttributeType::temporal);
  EXPECT_EQ(infer_attribute_type(cells({std::string("2021-01-02"), std::string("soon")})),
            AttributeType::nominal);
  EXPECT_THROW(infer_attribute_type(cells({std::monostate{}, std::monostate{}})), ValidationError);
}

TEST(InferType, Iso8601Epoch) {
  EXPECT_DOUBLE_EQ(*detail::parse_iso8601("1970-01-02"), 86400.0);
  EXPECT_DOUBLE_EQ(*detail::parse_iso8601("2000-01-01T00:00:01"), 946684801.0);
  EXPECT_FALSE(detail::parse_iso8601("2000-13-01"));
}

TEST(VisualConfiguration, ScatterOfTwoQuantitativeColumns) {
  const Corpus c = corpus_from_json_text(kMinimal);
  const auto& config = c.registry.at(c.visualizations[0].config_id);
  EXPECT_EQ(config.canonical(),
            "mark=scatter;x=quantitative;y=quantitative;color=none;size=none;"
            "x-aggregate=none;y-aggregate=none");
}

TEST(VisualConfiguration, SharedAcrossDatasets) {
  const char* text = R"({
    "datasets": [{"id": 0, "columns": [{"name": "a", "values": [1.5, 2]}, {"name": "b", "values": [3.5, 2]}]},
                 {"id": 1, "columns": [{"name": "zz", "values": [-4.5, 2]}, {"name": "yy", "values": [7.25, 1]}]}],
    "visualizations": [
      {"user": 0, "dataset": 0, "attrs": [0, 1], "channels": {"mark": "scatter", "x": 0, "y": 1}},
      {"user": 1, "dataset": 1, "attrs": [2, 3], "channels": {"mark": "scatter", "x": 3, "y": 2}}]})";
  const Corpus c = corpus_from_json_text(text);
  EXPECT_EQ(c.visualizations[0].config_id, c.visualizations[1].config_id);
  EXPECT_EQ(c.num_configs(), 1u);
}

TEST(VisualConfiguration, ExtractRegistersDeduplicated) {
  Corpus c = corpus_from_json_text(kMinimal);
  VisualizationSpec vis = c.visualizations[0];
  vis.design.bound[1].reset();
  vis.attribute_ids = {0};
  const auto cfg = extract_visual_configuration(vis, c);
  EXPECT_EQ(cfg.config_id, 1);
  EXPECT_EQ(extract_visual_configuration(vis, c).config_id, 1);
  EXPECT_EQ(c.num_configs(), 2u);
  EXPECT_FALSE(cfg.channel_types[1].has_value());
}

TEST(VisualConfiguration, RegistryMuchSmallerThanVisualizations) {
  const Corpus c = generate_synthetic_corpus(5, 60, 30, 6, 3);
  EXPECT_LE(c.num_configs(), c.visualizations.size());
  EXPECT_LT(c.num_configs() * 4, c.visualizations.size());
}

TEST(VisualConfiguration, DataIndependentSerialization) {
  const Corpus c = generate_synthetic_corpus(9, 20, 10, 6, 3);
  for (const auto& config : c.registry.configs()) {
    const std::string s = config.canonical();
    EXPECT_EQ(s.find_first_of("0123456789"), std::string::npos) << s;
    for (const auto& ds : c.datasets)
      for (const auto& col : ds.columns) EXPECT_EQ(s.find(col.name), std::string::npos) << s;
  }
}

TEST(VisualConfiguration, AbstractionIsIdempotent) {
  // Rebinding a configuration to other attributes of the same types yields the
  // same configuration.
  const Corpus c = generate_synthetic_corpus(11, 15, 10, 6, 3);
  for (const auto& vis : c.visualizations) {
    const Dataset& ds = c.dataset(vis.dataset_id);
    VisualizationSpec rebuilt = vis;
    std::set<int> taken;
    for (auto& b : rebuilt.design.bound) {
      if (!b) continue;
      const auto type = c.attribute(*b).inferred_type;
      for (const auto& col : ds.columns) {
        if (col.inferred_type == type && !taken.count(col.attribute_id)) {
          b = col.attribute_id;
          taken.insert(col.attribute_id);
          break;
        }
      }
    }
    EXPECT_EQ(abstract_configuration(rebuilt, c).canonical(), c.registry.at(vis.config_id).canonical());
  }
}

// --- candidate enumeration --------------------------------------------------

Dataset typed_dataset(const std::vector<AttributeType>& types, int first_id = 0) {
  Dataset ds;
  ds.dataset_id = 0;
  for (std::size_t i = 0; i < types.size(); ++i) {
    AttributeColumn col;
    col.attribute_id = first_id + static_cast<int>(i);
    col.name = "c" + std::to_string(i);
    col.values = {1.0};
    col.inferred_type = types[i];
    ds.columns.push_back(col);
  }
  return ds;
}

VisualConfiguration config_of(int id, std::array<ChannelType, kNumDataChannels> types) {
  VisualConfiguration c;
  c.config_id = id;
  c.mark = "m" ;
  c.channel_types = types;
  return c;
}

std::vector<Candidate> collect(const Dataset& ds, const std::vector<VisualConfiguration>& reg, int max_attrs) {
  std::vector<Candidate> out;
  enumerate_candidate_visualizations(ds, reg, max_attrs, [&](const Candidate& c) {
    out.push_back(c);
    return true;
  });
  return out;
}

TEST(EnumerateCandidates, TwoQuantitativeColumnsOrderedPairs) {
  const auto q = AttributeType::quantitative;
  const Dataset ds = typed_dataset({q, q});
  const std::vector<VisualConfiguration> reg = {config_of(0, {q, q, std::nullopt, std::nullopt})};
  const auto cands = collect(ds, reg, 2);
  ASSERT_EQ(cands.size(), 2u);
  EXPECT_EQ(cands[0].attribute_ids, (std::vector<int>{0, 1}));
  EXPECT_EQ(cands[1].attribute_ids, (std::vector<int>{1, 0}));
}

TEST(EnumerateCandidates, NoSingleChannelConfigGivesEmptyStream) {
  const auto q = AttributeType::quantitative;
  const Dataset ds = typed_dataset({q, q, q});
  const std::vector<VisualConfiguration> reg = {config_of(0, {q, q, std::nullopt, std::nullopt})};
  EXPECT_TRUE(collect(ds, reg, 1).empty());
  EXPECT_THROW(collect(ds, reg, 0), ArgumentError);
}

TEST(EnumerateCandidates, LargerDatasetHasMoreCandidates) {
  const auto q = AttributeType::quantitative;
  const std::vector<VisualConfiguration> reg = {config_of(0, {q, q, std::nullopt, std::nullopt}),
                                                config_of(1, {q, std::nullopt, std::nullopt, std::nullopt})};
  EXPECT_GT(count_candidate_visualizations(typed_dataset({q, q, q}), reg, 3),
            count_candidate_visualizations(typed_dataset({q, q}), reg, 3));
}

TEST(EnumerateCandidates, StopsWhenVisitorReturnsFalse) {
  const auto q = AttributeType::quantitative;
  const std::vector<VisualConfiguration> reg = {config_of(0, {q, q, std::nullopt, std::nullopt})};
  int seen = 0;
  enumerate_candidate_visualizations(typed_dataset({q, q, q, q}), reg, 3, [&](const Candidate&) {
    return ++seen < 3;
  });
  EXPECT_EQ(seen, 3);
}

// Brute-force oracle: every ordered tuple of distinct columns of every length,
// kept when the per-position types match the config.
std::set<Candidate> brute_force(const Dataset& ds, const std::vector<VisualConfiguration>& reg, int max_attrs) {
  std::set<Candidate> out;
  const int n = static_cast<int>(ds.columns.size());
  for (const auto& cfg : reg) {
    const auto types = cfg.bound_types();
    const int len = static_cast<int>(types.size());
    if (len == 0 || len > max_attrs) continue;
    int total = 1;
    for (int i = 0; i < len; ++i) total *= n;
    for (int code = 0; code < total; ++code) {
      std::vector<int> idx;
      int rest = code;
      for (int i = 0; i < len; ++i) {
        idx.push_back(rest % n);
        rest /= n;
      }
      std::set<int> distinct(idx.begin(), idx.end());
      if (static_cast<int>(distinct.size()) != len) continue;
      bool ok = true;
      for (int i = 0; i < len; ++i) ok = ok && ds.columns[idx[i]].inferred_type == types[i];
      if (!ok) continue;
      Candidate c;
      c.config_id = cfg.config_id;
      for (int i : idx) c.attribute_ids.push_back(ds.columns[i].attribute_id);
      out.insert(c);
    }
  }
  return out;
}

TEST(EnumerateCandidates, MatchesBruteForceOracle) {
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const int ncols = 1 + static_cast<int>(rng.below(4));
    std::vector<AttributeType> types;
    for (int i = 0; i < ncols; ++i) types.push_back(static_cast<AttributeType>(rng.below(4)));
    const Dataset ds = typed_dataset(types, static_cast<int>(rng.below(50)));
    std::vector<VisualConfiguration> reg;
    const int nconf = 1 + static_cast<int>(rng.below(6));
    for (int k = 0; k < nconf; ++k) {
      std::array<ChannelType, kNumDataChannels> ch{};
      for (auto& t : ch)
        if (rng.below(2)) t = static_cast<AttributeType>(rng.below(4));
      reg.push_back(config_of(k, ch));
    }
    const int max_attrs = 1 + static_cast<int>(rng.below(4));
    const auto got = collect(ds, reg, max_attrs);
    const std::set<Candidate> unique(got.begin(), got.end());
    EXPECT_EQ(unique.size(), got.size()) << "duplicates at trial " << trial;
    EXPECT_EQ(unique, brute_force(ds, reg, max_attrs)) << "trial " << trial;
  }
}

TEST(EnumerateCandidates, AddingAColumnNeverShrinksTheSpace) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<AttributeType> types;
    const int ncols = 1 + static_cast<int>(rng.below(5));
    for (int i = 0; i < ncols; ++i) types.push_back(static_cast<AttributeType>(rng.below(4)));
    std::vector<VisualConfiguration> reg;
    for (int k = 0; k < 5; ++k) {
      std::array<ChannelType, kNumDataChannels> ch{};
      for (auto& t : ch)
        if (rng.below(2)) t = static_cast<AttributeType>(rng.below(4));
      reg.push_back(config_of(k, ch));
    }
    const auto before = count_candidate_visualizations(typed_dataset(types), reg, 3);
    types.push_back(static_cast<AttributeType>(rng.below(4)));
    EXPECT_GE(count_candidate_visualizations(typed_dataset(types), reg, 3), before);
  }
}

// --- synthetic corpora --------------------------------------------------------

TEST(SyntheticCorpus, DeterministicForSeed) {
  EXPECT_TRUE(generate_synthetic_corpus(17, 10, 10, 6, 3) == generate_synthetic_corpus(17, 10, 10, 6, 3));
  EXPECT_FALSE(generate_synthetic_corpus(17, 10, 10, 6, 3) == generate_synthetic_corpus(18, 10, 10, 6, 3));
}

TEST(SyntheticCorpus, EveryUserEvaluable) {
  const Corpus c = generate_synthetic_corpus(1, 10, 10, 6, 3);
  std::map<std::pair<int, int>, int> per_user_dataset;
  for (const auto& v : c.visualizations) ++per_user_dataset[{v.user_id, v.dataset_id}];
  for (int u = 0; u < c.num_users; ++u) {
    int best = 0;
    for (const auto& [key, count] : per_user_dataset)
      if (key.first == u) best = std::max(best, count);
    EXPECT_GE(best, 2) << "user " << u;
  }
}

TEST(SyntheticCorpus, DistinctPositivesPerUserDataset) {
  const Corpus c = generate_synthetic_corpus(2, 40, 20, 6, 3);
  std::set<std::tuple<int, int, Candidate>> seen;
  for (const auto& v : c.visualizations)
    EXPECT_TRUE(seen.insert({v.user_id, v.dataset_id, candidate_of(v)}).second);
}

TEST(CorpusStats, CountsAndMeans) {
  const Corpus c = corpus_from_json_text(kMinimal);
  const auto s = corpus_stats(c);
  EXPECT_EQ(s.users, 1u);
  EXPECT_EQ(s.attributes, 2u);
  EXPECT_EQ(s.visualizations, 1u);
  EXPECT_EQ(s.configs, 1u);
  EXPECT_DOUBLE_EQ(s.mean_attrs_per_dataset, 2.0);
  EXPECT_DOUBLE_EQ(s.mean_vis_per_user, 1.0);
  EXPECT_DOUBLE_EQ(s.mean_datasets_per_user, 1.0);
}

}  // namespace
}  // namespace pvis
