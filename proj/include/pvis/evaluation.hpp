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

// Leave-one-out evaluation: one held-out positive per eligible user, ranked
// against 19 sampled non-relevant candidates from the same dataset.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pvis/baselines.hpp"
#include "pvis/candidates.hpp"
#include "pvis/common.hpp"
#include "pvis/corpus.hpp"
#include "pvis/factorization.hpp"
#include "pvis/graphs.hpp"
#include "pvis/metafeatures.hpp"
#include "pvis/neural.hpp"
#include "pvis/ranking.hpp"

namespace pvis {

inline constexpr int kSlateNegatives = 19;
inline constexpr int kDefaultKMax = 10;

struct HeldOut {
  int user = 0;
  int dataset = 0;
  VisualizationSpec test;
  std::optional<VisualizationSpec> validation;
};

struct EvalSplit {
  std::vector<HeldOut> held_out;         // ascending user id
  std::vector<VisualizationSpec> train;  // corpus order, held-out events removed
  std::vector<VisualizationSpec> validation;
  int eligible_users = 0;
};

namespace eval_detail {

using UserDataset = std::pair<int, int>;

// Distinct positives per (user, dataset), first occurrence order.
inline std::map<UserDataset, std::vector<const VisualizationSpec*>> distinct_positives(const Corpus& corpus) {
  std::map<UserDataset, std::vector<const VisualizationSpec*>> out;
  std::map<UserDataset, std::set<Candidate>> seen;
  for (const auto& v : corpus.visualizations) {
    const UserDataset key{v.user_id, v.dataset_id};
    if (seen[key].insert(candidate_of(v)).second) out[key].push_back(&v);
  }
  return out;
}

}  // namespace eval_detail

// Picks, per user with >= 2 distinct positives on some dataset, one such
// dataset and one held-out positive on it (plus a validation positive when
// there are >= 3). Every copy of a held-out event leaves the training side.
inline EvalSplit make_split(const Corpus& corpus, std::uint64_t seed) {
  const auto groups = eval_detail::distinct_positives(corpus);
  std::map<int, std::vector<int>> eligible_datasets;
  for (const auto& [key, pos] : groups)
    if (pos.size() >= 2) eligible_datasets[key.first].push_back(key.second);
  if (eligible_datasets.empty())
    throw ValidationError("no eligible users: every user needs >= 2 distinct visualizations on some dataset");

  EvalSplit split;
  std::set<std::tuple<int, int, Candidate>> removed;
  for (const auto& [user, datasets] : eligible_datasets) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(user)));
    const int dataset = datasets[rng.below(datasets.size())];
    std::vector<const VisualizationSpec*> pos = groups.at({user, dataset});
    HeldOut h;
    h.user = user;
    h.dataset = dataset;
    const auto t = rng.below(pos.size());
    h.test = *pos[t];
    pos.erase(pos.begin() + static_cast<std::ptrdiff_t>(t));
    removed.insert({user, dataset, candidate_of(h.test)});
    if (pos.size() >= 2) {
      h.validation = *pos[rng.below(pos.size())];
      removed.insert({user, dataset, candidate_of(*h.validation)});
      split.validation.push_back(*h.validation);
    }
    split.held_out.push_back(std::move(h));
  }
  split.eligible_users = static_cast<int>(split.held_out.size());
  for (const auto& v : corpus.visualizations)
    if (!removed.count({v.user_id, v.dataset_id, candidate_of(v)})) split.train.push_back(v);
  return split;
}

// Hard error if any held-out event survives on the training side.
inline void check_no_leakage(const EvalSplit& split) {
  std::set<std::tuple<int, int, Candidate>> train;
  for (const auto& v : split.train) train.insert({v.user_id, v.dataset_id, candidate_of(v)});
  for (const auto& h : split.held_out) {
    if (train.count({h.user, h.dataset, candidate_of(h.test)}))
      throw ValidationError("leakage: held-out visualization of user " + std::to_string(h.user) +
                            " is present in the training split");
    if (h.validation && train.count({h.user, h.dataset, candidate_of(*h.validation)}))
      throw ValidationError("leakage: validation visualization of user " + std::to_string(h.user) +
                            " is present in the training split");
  }
}

struct EvalSlate {
  int user = 0;
  int dataset = 0;
  std::vector<Candidate> candidates;  // [0] is the held-out positive
};

// 19 distinct negatives from the held-out dataset's candidate space, none of
// which the user ever created on that dataset. Each user's stream is seeded
// from (seed, user) so slates do not depend on evaluation order.
inline EvalSlate make_slate(const Corpus& corpus, const CandidateIndex& index, const HeldOut& h, std::uint64_t seed) {
  std::set<Candidate> relevant;
  for (const auto& v : corpus.visualizations)
    if (v.user_id == h.user && v.dataset_id == h.dataset) relevant.insert(candidate_of(v));
  Rng rng(mix_seed(seed ^ 0x736c617465ULL, static_cast<std::uint64_t>(h.user)));
  EvalSlate s{h.user, h.dataset, {candidate_of(h.test)}};
  const auto negatives = sample_negatives(index.of(h.dataset), relevant, kSlateNegatives, rng);
  if (static_cast<int>(negatives.size()) < kSlateNegatives)
    throw ValidationError("dataset " + std::to_string(h.dataset) + " has only " + std::to_string(negatives.size()) +
                          " non-relevant candidates for user " + std::to_string(h.user) +
                          "; 19 are needed (increase max_attrs)");
  s.candidates.insert(s.candidates.end(), negatives.begin(), negatives.end());
  return s;
}

inline std::vector<EvalSlate> make_slates(const Corpus& corpus, const CandidateIndex& index, const EvalSplit& split,
                                          std::uint64_t seed) {
  std::vector<EvalSlate> out;
  out.reserve(split.held_out.size());
  for (const auto& h : split.held_out) out.push_back(make_slate(corpus, index, h, seed));
  return out;
}

// ---------------------------------------------------------------------------
// Metrics.

struct ModelResult {
  std::string name;
  std::vector<int> ranks;  // per slate, 1-based
  std::vector<double> hr;  // HR@1..K_max
  std::vector<double> ndcg;
};

inline ModelResult summarize(std::string name, std::vector<int> ranks, int k_max) {
  ModelResult r{std::move(name), std::move(ranks), std::vector<double>(static_cast<std::size_t>(k_max), 0.0),
                std::vector<double>(static_cast<std::size_t>(k_max), 0.0)};
  if (r.ranks.empty()) return r;
  for (int k = 1; k <= k_max; ++k) {
    double hr = 0.0, ndcg = 0.0;
    for (int rank : r.ranks) {
      hr += hit_rate_at(rank, k);
      ndcg += ndcg_at(rank, k);
    }
    r.hr[static_cast<std::size_t>(k - 1)] = hr / static_cast<double>(r.ranks.size());
    r.ndcg[static_cast<std::size_t>(k - 1)] = ndcg / static_cast<double>(r.ranks.size());
  }
  return r;
}

inline ModelResult evaluate_scorer(const std::string& name, const SlateScorer& scorer,
                                   std::span<const EvalSlate> slates, int k_max) {
  std::vector<int> ranks;
  ranks.reserve(slates.size());
  for (const auto& s : slates) {
    const auto scores = scorer(s.user, s.candidates);
    if (scores.size() != s.candidates.size()) throw Error("scorer '" + name + "' returned the wrong slate size");
    ranks.push_back(rank_of(s.candidates, scores, 0));
  }
  return summarize(name, std::move(ranks), k_max);
}

struct MetricsReport {
  int k_max = kDefaultKMax;
  std::uint64_t seed = 1;
  int eligible_users = 0;
  std::vector<int> users;  // slate order
  std::vector<ModelResult> models;
  nlohmann::json metadata = nlohmann::json::object();

  const ModelResult& model(const std::string& name) const {
    for (const auto& m : models)
      if (m.name == name) return m;
    throw ArgumentError("model '" + name + "' not in report");
  }
  double hr(const std::string& name, int k) const { return model(name).hr.at(static_cast<std::size_t>(k - 1)); }
  double ndcg(const std::string& name, int k) const { return model(name).ndcg.at(static_cast<std::size_t>(k - 1)); }
};

inline nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json j;
  j["engine"] = std::string(kVersion);
  j["metadata"] = r.metadata;
  j["seed"] = r.seed;
  j["k_max"] = r.k_max;
  j["eligible_users"] = r.eligible_users;
  j["users"] = r.users;
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : r.models)
    models.push_back({{"name", m.name}, {"hr", m.hr}, {"ndcg", m.ndcg}, {"ranks", m.ranks}});
  j["models"] = std::move(models);
  return j;
}

inline MetricsReport report_from_json(const nlohmann::json& j) {
  try {
    MetricsReport r;
    r.metadata = j.value("metadata", nlohmann::json::object());
    r.seed = j.at("seed").get<std::uint64_t>();
    r.k_max = j.at("k_max").get<int>();
    r.eligible_users = j.at("eligible_users").get<int>();
    r.users = j.at("users").get<std::vector<int>>();
    for (const auto& m : j.at("models"))
      r.models.push_back({m.at("name").get<std::string>(), m.at("ranks").get<std::vector<int>>(),
                          m.at("hr").get<std::vector<double>>(), m.at("ndcg").get<std::vector<double>>()});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
}

// Rows of models, columns HR@K and NDCG@K for the requested cutoffs.
inline std::string render_table(const MetricsReport& r, std::span<const int> ks, bool csv) {
  std::string out;
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };
  std::vector<std::string> header{"model"};
  for (int k : ks) header.push_back("HR@" + std::to_string(k));
  for (int k : ks) header.push_back("NDCG@" + std::to_string(k));
  std::vector<std::vector<std::string>> rows{header};
  for (const auto& m : r.models) {
    std::vector<std::string> row{m.name};
    for (int k : ks) row.push_back(fmt(r.hr(m.name, k)));
    for (int k : ks) row.push_back(fmt(r.ndcg(m.name, k)));
    rows.push_back(std::move(row));
  }
  if (csv) {
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + row[c];
      out += "\n";
    }
    return out;
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::string cell = row[c];
      cell.resize(width[c], ' ');
      out += (c ? "  " : "") + cell;
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += "\n";
  }
  return out;
}

// Long-format curve data: model,metric,k,value.
inline std::string render_plotdata(const MetricsReport& r) {
  std::string out = "model,metric,k,value\n";
  char buf[64];
  for (const auto& m : r.models) {
    for (int k = 1; k <= r.k_max; ++k) {
      std::snprintf(buf, sizeof buf, ",HR,%d,%.6f\n", k, m.hr[static_cast<std::size_t>(k - 1)]);
      out += m.name + buf;
    }
    for (int k = 1; k <= r.k_max; ++k) {
      std::snprintf(buf, sizeof buf, ",NDCG,%d,%.6f\n", k, m.ndcg[static_cast<std::size_t>(k - 1)]);
      out += m.name + buf;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model registry.

inline constexpr std::array<std::string_view, 13> kModelNames = {
    "pvisrec", "pvisrec-acm", "pvisrec-acd", "pvisrec-mfe", "neural", "neural-cmf", "vispop",
    "visknn",  "visconfigknn", "eals",       "mlp",         "global", "random"};

inline bool is_known_model(std::string_view name) {
  return std::find(kModelNames.begin(), kModelNames.end(), name) != kModelNames.end();
}

struct ExperimentConfig {
  TrainConfig train;
  NeuralConfig neural;
  EalsConfig eals;
  int k_nn = kDefaultNeighbors;
  int mfe_rank = 8;
  int max_attrs = 3;
  int k_max = kDefaultKMax;
  bool binarize = false;
  std::uint64_t seed = 1;  // split, slates and the random scorer

  void validate() const {
    train.validate();
    neural.validate();
    eals.validate();
    if (k_nn < 1) throw ArgumentError("k_nn must be >= 1");
    if (mfe_rank < 1) throw ArgumentError("mfe_rank must be >= 1");
    if (max_attrs < 1) throw ArgumentError("max_attrs must be >= 1");
    if (k_max < 1 || k_max > kSlateNegatives + 1) throw ArgumentError("k_max must lie in [1, 20]");
  }
};

// Lazily fitted models over the training side of one split. Shared pieces
// (CMF embeddings, the neural model) are fitted once and reused.
class ModelSuite {
 public:
  ModelSuite(const Corpus& corpus, const EvalSplit& split, const CandidateIndex& index, ExperimentConfig cfg,
             const Matrix* meta = nullptr)
      : corpus_(&corpus), split_(&split), index_(&index), cfg_(std::move(cfg)),
        graphs_(build_graphs(GraphShape::of(corpus), split.train, cfg_.binarize)) {
    if (meta) meta_ = *meta;
  }

  const InteractionGraphs& graphs() const { return graphs_; }

  // Uses already-fitted embeddings for a variant instead of fitting them.
  void set_cmf(Variant v, EmbeddingSet E) { cmf_[static_cast<int>(v)] = std::move(E); }

  const Matrix& meta() {
    if (!meta_) meta_ = build_meta_feature_matrix(*corpus_).M;
    return *meta_;
  }

  const EmbeddingSet& cmf(Variant v) {
    auto& slot = cmf_[static_cast<int>(v)];
    if (!slot) {
      TrainConfig tc = cfg_.train;
      tc.variant = v;
      slot = als_fit(graphs_, meta(), tc);
    }
    return *slot;
  }

  const EmbeddingSet& cmf_mfe() {
    if (!mfe_) {
      const Matrix& M = meta();
      const int r = std::min<int>(cfg_.mfe_rank, static_cast<int>(std::min(M.rows(), M.cols())));
      mfe_ = als_fit(graphs_, fit_meta_embedding(M, r).compressed(), cfg_.train);
    }
    return *mfe_;
  }

  const NeuralModel& neural() {
    if (!neural_) neural_ = train_neural(cmf(Variant::full), *index_, split_->train, cfg_.neural);
    return *neural_;
  }

  SlateScorer scorer(const std::string& name) {
    if (name == "pvisrec" || name == "pvisrec-acm" || name == "pvisrec-acd") {
      const Variant v = name == "pvisrec" ? Variant::full : parse_variant(name.substr(8));
      const EmbeddingSet* E = &cmf(v);
      return per_candidate([E](int u, const Candidate& c) { return score_visualization(*E, u, c); });
    }
    if (name == "pvisrec-mfe") {
      const EmbeddingSet* E = &cmf_mfe();
      return per_candidate([E](int u, const Candidate& c) { return score_visualization(*E, u, c); });
    }
    if (name == "neural") {
      const EmbeddingSet* E = &cmf(Variant::full);
      const NeuralModel* nn = &neural();
      return per_candidate([E, nn](int u, const Candidate& c) { return score_neural(*E, *nn, u, c); });
    }
    if (name == "neural-cmf") {
      const EmbeddingSet* E = &cmf(Variant::full);
      const NeuralModel* nn = &neural();
      const double alpha = cfg_.neural.alpha;
      const bool minmax = cfg_.neural.minmax_cmf;
      return [E, nn, alpha, minmax](int u, std::span<const Candidate> slate) {
        return score_neural_cmf_slate(*E, *nn, alpha, minmax, u, slate);
      };
    }
    if (name == "vispop") {
      auto ft = std::make_shared<FrequencyTables>(frequency_tables(graphs_));
      return per_candidate([ft](int, const Candidate& c) { return vispop_score(*ft, c); });
    }
    if (name == "visknn") {
      auto m = std::make_shared<VisKnnModel>(fit_visknn(graphs_, cfg_.k_nn));
      return per_candidate([m](int u, const Candidate& c) { return visknn_score(*m, u, c); });
    }
    if (name == "visconfigknn") {
      auto m = std::make_shared<ItemKnn>(graphs_.C, cfg_.k_nn);
      return per_candidate([m](int u, const Candidate& c) { return visconfigknn_score(*m, u, c); });
    }
    if (name == "eals") {
      auto m = std::make_shared<EalsModel>(eals_fit(graphs_, cfg_.eals));
      return per_candidate([m](int u, const Candidate& c) { return eals_score(*m, u, c); });
    }
    if (name == "mlp") {
      auto m = std::make_shared<MlpBaselineModel>(
          train_mlp_baseline(graphs_.num_users(), graphs_.num_attributes(), graphs_.num_configs(), cfg_.train.d,
                             *index_, split_->train, cfg_.neural));
      return per_candidate([m](int u, const Candidate& c) { return score_mlp_baseline(*m, u, c); });
    }
    if (name == "global") {
      const EmbeddingSet* E = &cmf(Variant::full);
      const RowVector centroid = user_centroid(*E);
      return per_candidate([E, centroid](int, const Candidate& c) { return global_centroid_score(*E, centroid, c); });
    }
    if (name == "random") {
      const std::uint64_t seed = cfg_.seed;
      return per_candidate([seed](int u, const Candidate& c) { return random_score(seed, u, c); });
    }
    throw ArgumentError("unknown model '" + name + "'");
  }

 private:
  const Corpus* corpus_;
  const EvalSplit* split_;
  const CandidateIndex* index_;
  ExperimentConfig cfg_;
  InteractionGraphs graphs_;
  std::optional<Matrix> meta_;
  std::optional<EmbeddingSet> cmf_[3];
  std::optional<EmbeddingSet> mfe_;
  std::optional<NeuralModel> neural_;
};

inline MetricsReport evaluate_models(std::span<const EvalSlate> slates,
                                     const std::vector<std::pair<std::string, SlateScorer>>& scorers, int k_max) {
  MetricsReport r;
  r.k_max = k_max;
  for (const auto& s : slates) r.users.push_back(s.user);
  for (const auto& [name, scorer] : scorers) r.models.push_back(evaluate_scorer(name, scorer, slates, k_max));
  return r;
}

// Split, slates, training on the training side only, then every named model
// on the same slates.
inline MetricsReport run_experiment(const Corpus& corpus, std::span<const std::string> models,
                                    const ExperimentConfig& cfg, const Matrix* meta = nullptr) {
  cfg.validate();
  for (const auto& m : models)
    if (!is_known_model(m)) throw ArgumentError("unknown model '" + m + "'");
  const EvalSplit split = make_split(corpus, cfg.seed);
  check_no_leakage(split);
  const CandidateIndex index(corpus, cfg.max_attrs);
  const auto slates = make_slates(corpus, index, split, cfg.seed);
  ModelSuite suite(corpus, split, index, cfg, meta);
  std::vector<std::pair<std::string, SlateScorer>> scorers;
  for (const auto& m : models) scorers.emplace_back(m, suite.scorer(m));
  MetricsReport r = evaluate_models(slates, scorers, cfg.k_max);
  r.seed = cfg.seed;
  r.eligible_users = split.eligible_users;
  return r;
}

}  // namespace pvis
