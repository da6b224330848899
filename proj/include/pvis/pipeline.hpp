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
#pragma once

// End-to-end runs driven by a JSON (with comments) configuration. Each stage
// is stamped with a hash of its configuration section and its inputs' stamps;
// a stage whose stamp and artifact are already on disk is reused.

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pvis/common.hpp"
#include "pvis/corpus.hpp"
#include "pvis/evaluation.hpp"
#include "pvis/factorization.hpp"
#include "pvis/graphs.hpp"
#include "pvis/metafeatures.hpp"
#include "pvis/synth.hpp"

namespace pvis {

using nlohmann::json;

// Planted corpus used when no corpus file is given: 200 users with rank-3
// preferences over 40 datasets of 8 columns, large enough that every held-out
// dataset has 19 non-relevant candidates.
inline SynthOptions default_run_synthetic() {
  SynthOptions o;
  o.seed = 1;
  o.num_users = 200;
  o.num_datasets = 40;
  o.cols_per_dataset = 8;
  o.planted_rank = 3;
  o.sharpness = 8.0;
  return o;
}

struct RunConfig {
  std::string corpus;  // path to a corpus JSON; empty uses `synthetic`
  SynthOptions synthetic = default_run_synthetic();
  std::string artifacts = "artifacts";

  int partitions_quartile = kPartitionCells[0];
  int partitions_equal_width = kPartitionCells[1];
  int partitions_kmeans = kPartitionCells[2];
  int histogram_bins = kHistogramBins;
  std::optional<int> mfe_rank;  // empty: full M

  bool binarize = false;
  TrainConfig train;
  NeuralConfig neural;
  EalsConfig eals;
  int k_nn = kDefaultNeighbors;

  std::vector<std::string> models{"pvisrec", "neural", "neural-cmf", "vispop", "visknn", "visconfigknn",
                                  "eals",    "mlp",    "global"};
  int k_max = kDefaultKMax;
  std::uint64_t eval_seed = 1;
  int max_attrs = 3;
  int compare_mfe_rank = 8;

  ExperimentConfig experiment() const {
    ExperimentConfig e;
    e.train = train;
    e.neural = neural;
    e.eals = eals;
    e.k_nn = k_nn;
    e.mfe_rank = compare_mfe_rank;
    e.max_attrs = max_attrs;
    e.k_max = k_max;
    e.binarize = binarize;
    e.seed = eval_seed;
    return e;
  }

  void validate() const {
    // The meta-feature catalog is fixed at compile time; other values would
    // silently change K and the layout hash.
    if (partitions_quartile != kPartitionCells[0] || partitions_equal_width != kPartitionCells[1] ||
        partitions_kmeans != kPartitionCells[2])
      throw ValidationError("partition counts must be quartile=4, equal-width=5, kmeans=4 (fixed catalog)");
    if (histogram_bins != kHistogramBins) throw ValidationError("histogram_bins must be 10 (fixed catalog)");
    if (mfe_rank && *mfe_rank < 1) throw ValidationError("mfe_rank must be >= 1 or \"full\"");
    for (const auto& m : models)
      if (!is_known_model(m)) throw ValidationError("unknown model '" + m + "'");
    if (models.empty()) throw ValidationError("eval.models must not be empty");
    try {
      experiment().validate();
    } catch (const ArgumentError& e) {
      throw ValidationError(e.what());
    }
  }
};

// ---------------------------------------------------------------------------
// JSON mapping. Every key is optional; unknown keys are rejected.

namespace pipeline_detail {

inline void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("bad value for " + where + "." + key);
  }
}

inline json section(const json& doc, const char* name) {
  return doc.contains(name) ? doc.at(name) : json::object();
}

}  // namespace pipeline_detail

inline json to_json(const RunConfig& c) {
  json widths = c.neural.widths.empty() ? json("auto") : json(c.neural.widths);
  return {
      {"corpus", c.corpus},
      {"synthetic",
       {{"seed", c.synthetic.seed},
        {"users", c.synthetic.num_users},
        {"datasets", c.synthetic.num_datasets},
        {"columns", c.synthetic.cols_per_dataset},
        {"rank", c.synthetic.planted_rank},
        {"sharpness", c.synthetic.sharpness}}},
      {"artifacts", c.artifacts},
      {"metafeatures",
       {{"partitions",
         {{"quartile", c.partitions_quartile}, {"equal-width", c.partitions_equal_width}, {"kmeans", c.partitions_kmeans}}},
        {"histogram_bins", c.histogram_bins},
        {"mfe_rank", c.mfe_rank ? json(*c.mfe_rank) : json("full")}}},
      {"graphs", {{"binarize", c.binarize}}},
      {"train",
       {{"d", c.train.d},
        {"lambda", c.train.lambda},
        {"iters", c.train.max_iters},
        {"tol", c.train.tol},
        {"seed", c.train.seed},
        {"variant", std::string(to_string(c.train.variant))}}},
      {"neural",
       {{"layers", c.neural.layers},
        {"widths", widths},
        {"activation", std::string(to_string(c.neural.activation))},
        {"lr", c.neural.lr},
        {"epochs", c.neural.epochs},
        {"batch_size", c.neural.batch_size},
        {"neg_per_pos", c.neural.neg_per_pos},
        {"s_max", c.neural.s_max},
        {"seed", c.neural.seed},
        {"alpha", c.neural.alpha},
        {"minmax_cmf", c.neural.minmax_cmf}}},
      {"baselines",
       {{"k_nn", c.k_nn},
        {"eals",
         {{"d", c.eals.d},
          {"lambda", c.eals.lambda},
          {"iters", c.eals.max_iters},
          {"c", c.eals.c},
          {"tol", c.eals.tol},
          {"seed", c.eals.seed}}}}},
      {"eval",
       {{"models", c.models},
        {"k_max", c.k_max},
        {"seed", c.eval_seed},
        {"max_attrs", c.max_attrs},
        {"mfe_rank", c.compare_mfe_rank}}},
  };
}

inline RunConfig run_config_from_json(const json& doc) {
  using namespace pipeline_detail;
  RunConfig c;
  reject_unknown(doc, {"corpus", "synthetic", "artifacts", "metafeatures", "graphs", "train", "neural", "baselines", "eval"},
                 "config");
  read(doc, "corpus", c.corpus, "config");
  read(doc, "artifacts", c.artifacts, "config");

  const json syn = section(doc, "synthetic");
  reject_unknown(syn, {"seed", "users", "datasets", "columns", "rank", "sharpness"}, "synthetic");
  read(syn, "seed", c.synthetic.seed, "synthetic");
  read(syn, "users", c.synthetic.num_users, "synthetic");
  read(syn, "datasets", c.synthetic.num_datasets, "synthetic");
  read(syn, "columns", c.synthetic.cols_per_dataset, "synthetic");
  read(syn, "rank", c.synthetic.planted_rank, "synthetic");
  read(syn, "sharpness", c.synthetic.sharpness, "synthetic");

  const json mf = section(doc, "metafeatures");
  reject_unknown(mf, {"partitions", "histogram_bins", "mfe_rank"}, "metafeatures");
  const json parts = section(mf, "partitions");
  reject_unknown(parts, {"quartile", "equal-width", "kmeans"}, "metafeatures.partitions");
  read(parts, "quartile", c.partitions_quartile, "metafeatures.partitions");
  read(parts, "equal-width", c.partitions_equal_width, "metafeatures.partitions");
  read(parts, "kmeans", c.partitions_kmeans, "metafeatures.partitions");
  read(mf, "histogram_bins", c.histogram_bins, "metafeatures");
  if (mf.contains("mfe_rank")) {
    const json& r = mf.at("mfe_rank");
    if (r.is_string() && r.get<std::string>() == "full") {
      c.mfe_rank.reset();
    } else if (r.is_number_integer()) {
      c.mfe_rank = r.get<int>();
    } else {
      throw ValidationError("metafeatures.mfe_rank must be an integer or \"full\"");
    }
  }

  const json gr = section(doc, "graphs");
  reject_unknown(gr, {"binarize"}, "graphs");
  read(gr, "binarize", c.binarize, "graphs");

  const json tr = section(doc, "train");
  reject_unknown(tr, {"d", "lambda", "iters", "tol", "seed", "variant"}, "train");
  read(tr, "d", c.train.d, "train");
  read(tr, "lambda", c.train.lambda, "train");
  read(tr, "iters", c.train.max_iters, "train");
  read(tr, "tol", c.train.tol, "train");
  read(tr, "seed", c.train.seed, "train");
  if (tr.contains("variant")) {
    std::string v;
    read(tr, "variant", v, "train");
    try {
      c.train.variant = parse_variant(v);
    } catch (const ArgumentError& e) {
      throw ValidationError(e.what());
    }
  }

  const json nn = section(doc, "neural");
  reject_unknown(nn, {"layers", "widths", "activation", "lr", "epochs", "batch_size", "neg_per_pos", "s_max", "seed",
                      "alpha", "minmax_cmf"},
                 "neural");
  read(nn, "layers", c.neural.layers, "neural");
  if (nn.contains("widths")) {
    const json& w = nn.at("widths");
    if (w.is_string() && w.get<std::string>() == "auto") {
      c.neural.widths.clear();
    } else {
      read(nn, "widths", c.neural.widths, "neural");
    }
  }
  if (nn.contains("activation")) {
    std::string a;
    read(nn, "activation", a, "neural");
    try {
      c.neural.activation = parse_activation(a);
    } catch (const ArgumentError& e) {
      throw ValidationError(e.what());
    }
  }
  read(nn, "lr", c.neural.lr, "neural");
  read(nn, "epochs", c.neural.epochs, "neural");
  read(nn, "batch_size", c.neural.batch_size, "neural");
  read(nn, "neg_per_pos", c.neural.neg_per_pos, "neural");
  read(nn, "s_max", c.neural.s_max, "neural");
  read(nn, "seed", c.neural.seed, "neural");
  read(nn, "alpha", c.neural.alpha, "neural");
  read(nn, "minmax_cmf", c.neural.minmax_cmf, "neural");

  const json bl = section(doc, "baselines");
  reject_unknown(bl, {"k_nn", "eals"}, "baselines");
  read(bl, "k_nn", c.k_nn, "baselines");
  const json ea = section(bl, "eals");
  reject_unknown(ea, {"d", "lambda", "iters", "c", "tol", "seed"}, "baselines.eals");
  read(ea, "d", c.eals.d, "baselines.eals");
  read(ea, "lambda", c.eals.lambda, "baselines.eals");
  read(ea, "iters", c.eals.max_iters, "baselines.eals");
  read(ea, "c", c.eals.c, "baselines.eals");
  read(ea, "tol", c.eals.tol, "baselines.eals");
  read(ea, "seed", c.eals.seed, "baselines.eals");

  const json ev = section(doc, "eval");
  reject_unknown(ev, {"models", "k_max", "seed", "max_attrs", "mfe_rank"}, "eval");
  read(ev, "models", c.models, "eval");
  read(ev, "k_max", c.k_max, "eval");
  read(ev, "seed", c.eval_seed, "eval");
  read(ev, "max_attrs", c.max_attrs, "eval");
  read(ev, "mfe_rank", c.compare_mfe_rank, "eval");

  c.validate();
  return c;
}

// Accepts // and /* */ comments.
inline RunConfig parse_run_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return run_config_from_json(doc);
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

// Hash of the canonical serialization (keys sorted, defaults filled in). The
// artifacts directory is a location, not a parameter, so it is left out.
inline std::string config_hash(const RunConfig& c) {
  json j = to_json(c);
  j.erase("artifacts");
  return hex64(fnv1a(j.dump()));
}

inline json version_stamp(const RunConfig& c) {
  return {{"engine", std::string(kVersion)},
          {"config_hash", config_hash(c)},
          {"seeds",
           {{"train", c.train.seed},
            {"neural", c.neural.seed},
            {"eals", c.eals.seed},
            {"eval", c.eval_seed},
            {"synthetic", c.corpus.empty() ? json(c.synthetic.seed) : json(nullptr)}}}};
}

// ---------------------------------------------------------------------------
// Stages.

struct StageOutcome {
  std::string name;
  std::string stamp;
  bool cached = false;
};

struct PipelineResult {
  std::vector<StageOutcome> stages;
  MetricsReport report;
  std::string report_path;

  const StageOutcome& stage(const std::string& name) const {
    for (const auto& s : stages)
      if (s.name == name) return s;
    throw ArgumentError("no stage '" + name + "'");
  }
};

namespace pipeline_detail {

inline std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  Fnv1a h;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) h.update(buf, static_cast<std::size_t>(in.gcount()));
  return hex64(h.digest());
}

inline std::string stamp_of(const std::string& stage, const json& inputs) {
  return hex64(fnv1a(stage + "\n" + inputs.dump()));
}

inline std::optional<std::string> read_stamp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string s;
  if (!in || !std::getline(in, s)) return std::nullopt;
  return s;
}

inline void write_stamp(const std::filesystem::path& p, const std::string& stamp) {
  std::ofstream out(p);
  out << stamp << "\n";
  if (!out) throw Error("cannot write '" + p.string() + "'");
}

// Re-throws with the stage name, keeping the error category.
template <typename F>
auto in_stage(const std::string& name, F&& f) -> decltype(f()) {
  const std::string prefix = "stage '" + name + "' failed: ";
  try {
    return f();
  } catch (const NumericalError& e) {
    throw NumericalError(prefix + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(prefix + e.what());
  } catch (const ParseError& e) {
    throw ParseError(prefix + e.what());
  } catch (const ArgumentError& e) {
    throw ArgumentError(prefix + e.what());
  } catch (const std::exception& e) {
    throw Error(prefix + e.what());
  }
}

}  // namespace pipeline_detail

using StageLogger = std::function<void(const StageOutcome&)>;

inline PipelineResult run_pipeline(const RunConfig& cfg, const StageLogger& log = {}) {
  using namespace pipeline_detail;
  namespace fs = std::filesystem;
  cfg.validate();
  const fs::path dir = cfg.artifacts;
  fs::create_directories(dir);
  const json full = to_json(cfg);
  PipelineResult result;

  // Runs `compute` unless the stamp on disk matches and the artifact exists;
  // `load` restores the artifact either way.
  auto stage = [&](const std::string& name, const json& inputs, const fs::path& artifact,
                   const std::function<void()>& compute) {
    StageOutcome out{name, stamp_of(name, inputs), false};
    const fs::path stamp_path = dir / (name + ".stamp");
    out.cached = fs::exists(artifact) && read_stamp(stamp_path) == out.stamp;
    if (!out.cached) {
      in_stage(name, [&] {
        compute();
        return 0;
      });
      write_stamp(stamp_path, out.stamp);
    }
    result.stages.push_back(out);
    if (log) log(out);
    return out.stamp;
  };

  // corpus: content-addressed by the input file, or by the synthetic options
  const fs::path corpus_path = dir / "corpus.json";
  const json corpus_in = cfg.corpus.empty() ? json{{"synthetic", full["synthetic"]}}
                                            : json{{"file", in_stage("corpus", [&] { return file_digest(cfg.corpus); })}};
  const std::string s_corpus = stage("corpus", corpus_in, corpus_path, [&] {
    const Corpus c = cfg.corpus.empty() ? generate_synthetic_corpus_with_truth(cfg.synthetic).corpus : load_corpus(cfg.corpus);
    save_corpus(c, corpus_path.string());
  });
  const Corpus corpus = in_stage("corpus", [&] { return load_corpus(corpus_path.string()); });

  const fs::path meta_path = dir / "M.bin";
  json mf_section = full["metafeatures"];
  mf_section.erase("mfe_rank");
  const std::string s_meta =
      stage("metafeatures", {{"corpus", s_corpus}, {"options", mf_section}, {"layout", hex64(meta_feature_layout_hash())}},
            meta_path, [&] { save_meta_feature_matrix(build_meta_feature_matrix(corpus), meta_path.string()); });
  Matrix M = in_stage("metafeatures", [&] { return load_meta_feature_matrix(meta_path.string()).M; });

  std::string s_m = s_meta;
  if (cfg.mfe_rank) {
    const fs::path emb_path = dir / "mfe.bin";
    s_m = stage("embedding", {{"meta", s_meta}, {"rank", *cfg.mfe_rank}}, emb_path, [&] {
      save_meta_embedding(fit_meta_embedding(M, *cfg.mfe_rank), meta_feature_layout_hash(), emb_path.string());
    });
    M = in_stage("embedding", [&] { return load_meta_embedding(emb_path.string()).compressed(); });
  }

  // graphs are built from the training side of the evaluation split
  const EvalSplit split = in_stage("graphs", [&] {
    EvalSplit s = make_split(corpus, cfg.eval_seed);
    check_no_leakage(s);
    return s;
  });
  const fs::path graphs_path = dir / "graphs.bin";
  const std::string s_graphs =
      stage("graphs", {{"corpus", s_corpus}, {"options", full["graphs"]}, {"split_seed", cfg.eval_seed}}, graphs_path,
            [&] {
              save_graphs(build_graphs(GraphShape::of(corpus), split.train, cfg.binarize), graphs_path.string());
            });
  const InteractionGraphs graphs = in_stage("graphs", [&] { return load_graphs(graphs_path.string()); });

  const fs::path model_path = dir / "model.bin";
  const std::string s_train = stage("train", {{"graphs", s_graphs}, {"meta", s_m}, {"options", full["train"]}},
                                    model_path, [&] { save_model(als_fit(graphs, M, cfg.train), cfg.train, model_path.string()); });
  EmbeddingSet E = in_stage("train", [&] { return load_model(model_path.string()); });

  const fs::path report_path = dir / "report.json";
  stage("eval",
        {{"train", s_train},
         {"graphs", s_graphs},
         {"meta", s_m},
         {"config", {{"neural", full["neural"]}, {"baselines", full["baselines"]}, {"eval", full["eval"]}, {"train", full["train"]}}}},
        report_path, [&] {
          const CandidateIndex index(corpus, cfg.max_attrs);
          const auto slates = make_slates(corpus, index, split, cfg.eval_seed);
          ModelSuite suite(corpus, split, index, cfg.experiment(), &M);
          suite.set_cmf(cfg.train.variant, E);
          std::vector<std::pair<std::string, SlateScorer>> scorers;
          for (const auto& m : cfg.models) scorers.emplace_back(m, suite.scorer(m));
          MetricsReport r = evaluate_models(slates, scorers, cfg.k_max);
          r.seed = cfg.eval_seed;
          r.eligible_users = split.eligible_users;
          r.metadata = version_stamp(cfg);
          std::ofstream out(report_path);
          out << to_json(r).dump(2) << "\n";
          if (!out) throw Error("cannot write '" + report_path.string() + "'");
        });
  result.report = in_stage("eval", [&] {
    std::ifstream in(report_path);
    return report_from_json(json::parse(in));
  });
  result.report_path = report_path.string();
  return result;
}

}  // namespace pvis
