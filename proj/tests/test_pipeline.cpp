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
#include <fstream>
#include <set>
#include <sstream>

#include "pvis/pipeline.hpp"

namespace pvis {
namespace {

namespace fs = std::filesystem;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("pvis_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  RunConfig small(const std::string& sub) const {
    RunConfig c;
    c.synthetic.num_users = 25;
    c.synthetic.num_datasets = 10;
    c.synthetic.cols_per_dataset = 8;
    c.artifacts = (root_ / sub).string();
    c.train.max_iters = 8;
    c.neural.epochs = 2;
    c.eals.max_iters = 3;
    c.models = {"pvisrec", "neural-cmf", "vispop", "global", "random"};
    return c;
  }

  fs::path root_;
};

TEST_F(PipelineTest, FreshRunThenFullyCached) {
  const RunConfig cfg = small("a");
  const PipelineResult first = run_pipeline(cfg);
  for (const auto& s : first.stages) EXPECT_FALSE(s.cached) << s.name;
  for (const char* f : {"corpus.json", "M.bin", "graphs.bin", "model.bin", "report.json"})
    EXPECT_TRUE(fs::exists(fs::path(cfg.artifacts) / f)) << f;
  EXPECT_EQ(first.report.models.size(), 5u);

  const PipelineResult second = run_pipeline(cfg);
  ASSERT_EQ(second.stages.size(), first.stages.size());
  for (std::size_t i = 0; i < second.stages.size(); ++i) {
    EXPECT_TRUE(second.stages[i].cached) << second.stages[i].name;
    EXPECT_EQ(second.stages[i].stamp, first.stages[i].stamp);
  }
}

TEST_F(PipelineTest, ChangingDRerunsOnlyTrainAndEval) {
  RunConfig cfg = small("a");
  run_pipeline(cfg);
  cfg.train.d = 8;
  const PipelineResult r = run_pipeline(cfg);
  // reachability: d feeds the train stage, and eval depends on train
  const std::set<std::string> rerun{"train", "eval"};
  for (const auto& s : r.stages) EXPECT_EQ(!s.cached, rerun.count(s.name) == 1) << s.name;
}

TEST_F(PipelineTest, EmbeddingStageOnlyWhenRankGiven) {
  RunConfig cfg = small("a");
  cfg.mfe_rank = 4;
  const PipelineResult r = run_pipeline(cfg);
  EXPECT_NO_THROW(r.stage("embedding"));
  EXPECT_TRUE(fs::exists(fs::path(cfg.artifacts) / "mfe.bin"));
  cfg.mfe_rank.reset();
  EXPECT_THROW(run_pipeline(cfg).stage("embedding"), ArgumentError);
}

TEST_F(PipelineTest, CachedReportEqualsRecomputedAndRunsAreByteIdentical) {
  const RunConfig a = small("a"), b = small("b");
  run_pipeline(a);
  const PipelineResult cached = run_pipeline(a);
  const PipelineResult fresh = run_pipeline(b);
  EXPECT_EQ(slurp(cached.report_path), slurp(fresh.report_path));
  EXPECT_EQ(slurp((fs::path(a.artifacts) / "model.bin").string()), slurp((fs::path(b.artifacts) / "model.bin").string()));
  EXPECT_EQ(fresh.report.metadata.at("config_hash").get<std::string>(), config_hash(b));
}

TEST(RunConfig, HashStableAndSensitiveToEveryField) {
  const RunConfig base;
  EXPECT_EQ(config_hash(base), config_hash(RunConfig{}));
  const json doc = to_json(base);
  std::set<std::string> hashes{config_hash(base)};
  int changed = 0;
  // flip every leaf of the canonical document and re-parse it
  std::function<void(const json::json_pointer&, const json&)> visit = [&](const json::json_pointer& ptr,
                                                                         const json& node) {
    if (node.is_object()) {
      for (const auto& [k, v] : node.items()) visit(ptr / k, v);
      return;
    }
    if (ptr.to_string() == "/artifacts") return;
    json mutated = doc;
    json& leaf = mutated[ptr];
    if (leaf.is_boolean()) {
      leaf = !leaf.get<bool>();
    } else if (leaf.is_number_float()) {
      leaf = leaf.get<double>() * 0.5;
    } else if (leaf.is_number()) {
      leaf = leaf.get<std::int64_t>() + 1;
    } else if (ptr.to_string() == "/corpus") {
      leaf = "other.json";
    } else if (ptr.to_string() == "/train/variant") {
      leaf = "acm";
    } else if (ptr.to_string() == "/neural/activation") {
      leaf = "tanh";
    } else if (ptr.to_string() == "/neural/widths") {
      leaf = json::array({20, 10});
      mutated["neural"]["layers"] = 2;
    } else if (ptr.to_string() == "/metafeatures/mfe_rank") {
      leaf = 8;
    } else if (ptr.to_string() == "/eval/models") {
      leaf = json::array({"pvisrec"});
    } else {
      ADD_FAILURE() << "unhandled leaf " << ptr.to_string();
      return;
    }
    RunConfig c;
    try {
      c = run_config_from_json(mutated);
    } catch (const ValidationError&) {
      return;  // fixed catalog fields cannot change
    }
    hashes.insert(config_hash(c));
    ++changed;
  };
  visit(json::json_pointer(), doc);
  EXPECT_GT(changed, 30);
  EXPECT_EQ(static_cast<int>(hashes.size()), changed + 1);
}

TEST(RunConfig, ParsesCommentsAndRejectsUnknownKeys) {
  const RunConfig c = parse_run_config(R"({
    // a comment
    "train": {"d": 6, /* inline */ "variant": "acd"},
    "metafeatures": {"mfe_rank": 4},
    "neural": {"widths": [24, 12, 6], "activation": "sigmoid"}
  })");
  EXPECT_EQ(c.train.d, 6);
  EXPECT_EQ(c.train.variant, Variant::acd);
  EXPECT_EQ(c.mfe_rank, 4);
  EXPECT_EQ(c.neural.widths, (std::vector<int>{24, 12, 6}));
  EXPECT_THROW(parse_run_config(R"({"trian": {}})"), ValidationError);
  EXPECT_THROW(parse_run_config(R"({"train": {"d": "ten"}})"), ValidationError);
  EXPECT_THROW(parse_run_config(R"({"metafeatures": {"histogram_bins": 12}})"), ValidationError);
  EXPECT_THROW(parse_run_config(R"({"eval": {"models": ["vizrec"]}})"), ValidationError);
  EXPECT_THROW(parse_run_config("{ not json"), ParseError);
  // round trip through the canonical form
  EXPECT_EQ(to_json(run_config_from_json(to_json(c))), to_json(c));
}

TEST(RunConfig, ReferenceConfigParses) {
  const RunConfig c = load_run_config(PVIS_SOURCE_DIR "/configs/reference.jsonc");
  EXPECT_EQ(config_hash(c), config_hash(RunConfig{}));
}

}  // namespace
}  // namespace pvis
