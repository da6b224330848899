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

// Synthetic corpora with planted low-rank preference structure.
//
// Every attribute is drawn from one of a fixed set of column "kinds" (value
// distribution + type). Kinds, configuration templates and users carry
// non-negative latent vectors of dimension `planted_rank`, and a user picks
// visualizations on their datasets with probability proportional to
//
//   ((u . z_config) * prod_j (u . w_kind(j)))^sharpness,
//
// sampled without replacement. The column distribution of a kind is visible
// to meta-features, so attribute preferences transfer across datasets.

#include <cstdio>

#include "pvis/corpus.hpp"

namespace pvis {

struct SynthOptions {
  std::uint64_t seed = 1;
  int num_users = 10;
  int num_datasets = 10;
  int cols_per_dataset = 6;
  int planted_rank = 3;
  int max_attrs = 3;
  double sharpness = 4.0;
  int min_rows = 30;
  int max_rows = 90;
  int min_datasets_per_user = 2;
  int max_datasets_per_user = 4;
  int max_vis_per_dataset = 5;
  double missing_rate = 0.02;
};

struct SynthTruth {
  Matrix user_latent;    // n x r
  Matrix kind_latent;    // kinds x r
  Matrix config_latent;  // registry configs x r, indexed by corpus config id
  std::vector<int> attribute_kind;  // per global attribute id
  Matrix attribute_latent;          // per global attribute id
};

namespace synth_detail {

enum class Kind { gauss, lognormal, uniform, rating, category_few, category_many, date, bimodal, count };
inline constexpr int kNumKinds = 9;

inline AttributeType kind_type(Kind k) {
  switch (k) {
    case Kind::rating: return AttributeType::ordinal;
    case Kind::category_few:
    case Kind::category_many: return AttributeType::nominal;
    case Kind::date: return AttributeType::temporal;
    default: return AttributeType::quantitative;
  }
}

inline std::string iso_date(long long days) {
  // civil_from_days
  days += 719468;
  const long long era = (days >= 0 ? days : days - 146096) / 146097;
  const auto doe = static_cast<unsigned>(days - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  long long y = static_cast<long long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", y, m, d);
  return buf;
}

inline std::vector<Cell> make_column(Kind kind, int rows, double missing_rate, Rng& rng) {
  std::vector<Cell> out;
  out.reserve(static_cast<std::size_t>(rows));
  const double loc = rng.uniform(-50.0, 150.0);
  const double scale = rng.uniform(1.0, 25.0);
  const int labels = kind == Kind::category_few ? 3 + static_cast<int>(rng.below(3))
                                                : 20 + static_cast<int>(rng.below(30));
  const long long start_day = 14000 + static_cast<long long>(rng.below(5000));
  const int step = 1 + static_cast<int>(rng.below(30));
  const double lambda = rng.uniform(30.0, 300.0);
  for (int r = 0; r < rows; ++r) {
    const bool can_miss = kind_type(kind) == AttributeType::quantitative;
    if (can_miss && r > 0 && rng.uniform() < missing_rate) {
      out.emplace_back(std::monostate{});
      continue;
    }
    switch (kind) {
      case Kind::gauss: out.emplace_back(loc + scale * rng.normal()); break;
      case Kind::lognormal: out.emplace_back(scale * std::exp(1.2 * rng.normal())); break;
      case Kind::uniform: out.emplace_back(rng.uniform(loc, loc + 10.0 * scale)); break;
      case Kind::rating: out.emplace_back(static_cast<double>(1 + rng.below(5))); break;
      case Kind::category_few: {
        // skewed label frequencies
        const double u = rng.uniform();
        const int label = static_cast<int>(std::floor(labels * u * u));
        out.emplace_back("c" + std::to_string(label));
        break;
      }
      case Kind::category_many:
        out.emplace_back("item_" + std::to_string(rng.below(static_cast<std::uint64_t>(labels))));
        break;
      case Kind::date: out.emplace_back(iso_date(start_day + static_cast<long long>(r) * step)); break;
      case Kind::bimodal:
        out.emplace_back((rng.uniform() < 0.5 ? loc : loc + 8.0 * scale) + 0.5 * scale * rng.normal());
        break;
      case Kind::count:
        out.emplace_back(std::round(lambda * std::exp(0.5 * rng.normal())));
        break;
    }
  }
  return out;
}

struct Template {
  std::string mark;
  std::array<ChannelType, kNumDataChannels> types;
  std::string x_agg = "none";
  std::string y_agg = "none";
};

inline std::vector<Template> templates() {
  using T = AttributeType;
  const ChannelType q = T::quantitative, n = T::nominal, o = T::ordinal, t = T::temporal, _ = std::nullopt;
  return {
      {"scatter", {q, q, _, _}},          {"scatter", {q, q, n, _}},
      {"scatter", {q, q, _, q}},          {"line", {t, q, _, _}},
      {"line", {t, q, n, _}},             {"area", {t, q, _, _}, "none", "sum"},
      {"bar", {n, q, _, _}, "none", "sum"}, {"bar", {n, q, _, _}, "none", "mean"},
      {"bar", {o, q, _, _}, "none", "mean"}, {"bar", {n, _, _, _}, "none", "count"},
      {"histogram", {q, _, _, _}, "bin"}, {"histogram", {o, _, _, _}},
      {"box", {n, q, _, _}},              {"box", {o, q, _, _}},
      {"pie", {n, _, _, _}, "none", "count"}, {"heatmap", {n, n, q, _}},
      {"heatmap", {o, n, q, _}},          {"line", {o, q, _, _}, "none", "mean"},
      {"scatter", {t, q, _, _}},          {"bar", {t, q, _, _}, "none", "sum"},
      {"line", {q, q, _, _}},             {"histogram", {t, _, _, _}, "bin"},
      {"bar", {n, o, _, _}, "none", "mean"}, {"scatter", {q, o, _, _}},
  };
}

inline RowVector nonneg_latent(int rank, Rng& rng) {
  RowVector v(rank);
  for (int k = 0; k < rank; ++k) v(k) = std::abs(rng.normal());
  return v;
}

}  // namespace synth_detail

struct SynthResult {
  Corpus corpus;
  SynthTruth truth;
};

inline SynthResult generate_synthetic_corpus_with_truth(const SynthOptions& opt) {
  using namespace synth_detail;
  if (opt.num_users < 1 || opt.num_datasets < 1 || opt.cols_per_dataset < 1 || opt.planted_rank < 1)
    throw ArgumentError("synthetic corpus counts must all be >= 1");
  Rng rng(mix_seed(opt.seed, 0x5eed));
  const int rank = opt.planted_rank;

  SynthResult result;
  Corpus& corpus = result.corpus;
  corpus.num_users = opt.num_users;

  // Latent structure.
  Matrix kind_latent(kNumKinds, rank);
  for (int k = 0; k < kNumKinds; ++k) kind_latent.row(k) = nonneg_latent(rank, rng);
  const auto tmpl = templates();
  Matrix template_latent(static_cast<Eigen::Index>(tmpl.size()), rank);
  for (std::size_t t = 0; t < tmpl.size(); ++t) template_latent.row(static_cast<Eigen::Index>(t)) = nonneg_latent(rank, rng);
  Matrix user_latent(opt.num_users, rank);
  for (int i = 0; i < opt.num_users; ++i) {
    RowVector u = 0.15 * nonneg_latent(rank, rng);
    u(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(rank)))) += 1.0 + 0.5 * std::abs(rng.normal());
    user_latent.row(i) = u;
  }

  // Datasets.
  std::vector<int> attribute_kind;
  int next_attribute = 0;
  for (int d = 0; d < opt.num_datasets; ++d) {
    Dataset ds;
    ds.dataset_id = d;
    const int rows = opt.min_rows + static_cast<int>(rng.below(static_cast<std::uint64_t>(opt.max_rows - opt.min_rows + 1)));
    for (int c = 0; c < opt.cols_per_dataset; ++c) {
      const auto kind = static_cast<Kind>(rng.below(kNumKinds));
      AttributeColumn col;
      col.attribute_id = next_attribute++;
      col.dataset_id = d;
      col.name = "col" + std::to_string(c);
      col.values = make_column(kind, rows, opt.missing_rate, rng);
      col.inferred_type = infer_attribute_type(col);
      attribute_kind.push_back(static_cast<int>(kind));
      ds.columns.push_back(std::move(col));
    }
    corpus.datasets.push_back(std::move(ds));
  }
  corpus.reindex();

  // Template registry used for generation; corpus ids are assigned on use.
  std::vector<VisualConfiguration> template_configs;
  for (std::size_t t = 0; t < tmpl.size(); ++t) {
    VisualConfiguration vc;
    vc.config_id = static_cast<int>(t);
    vc.mark = tmpl[t].mark;
    vc.channel_types = tmpl[t].types;
    vc.x_aggregate = tmpl[t].x_agg;
    vc.y_aggregate = tmpl[t].y_agg;
    template_configs.push_back(vc);
  }

  // Per-attribute latent: kind latent with mild multiplicative noise.
  Matrix attr_latent(next_attribute, rank);
  for (int a = 0; a < next_attribute; ++a) {
    attr_latent.row(a) = kind_latent.row(attribute_kind[a]) * std::exp(0.15 * rng.normal());
  }

  std::map<int, int> template_to_config;
  for (int i = 0; i < opt.num_users; ++i) {
    const int span = opt.max_datasets_per_user - opt.min_datasets_per_user + 1;
    const int want = std::min(opt.num_datasets, opt.min_datasets_per_user + static_cast<int>(rng.below(static_cast<std::uint64_t>(span))));
    std::vector<int> pool(static_cast<std::size_t>(opt.num_datasets));
    for (int d = 0; d < opt.num_datasets; ++d) pool[static_cast<std::size_t>(d)] = d;
    rng.shuffle(pool);
    const RowVector u = user_latent.row(i);
    bool evaluable = false;
    for (std::size_t j = 0; j < pool.size(); ++j) {
      if (static_cast<int>(j) >= want && evaluable) break;
      const Dataset& ds = corpus.datasets[static_cast<std::size_t>(pool[j])];
      std::vector<Candidate> cands;
      std::vector<double> weight;
      enumerate_candidate_visualizations(ds, template_configs, opt.max_attrs, [&](const Candidate& c) {
        double s = u.dot(template_latent.row(c.config_id));
        for (int a : c.attribute_ids) s *= u.dot(attr_latent.row(a));
        cands.push_back(c);
        weight.push_back(std::pow(s, opt.sharpness));
        return true;
      });
      // The user must end up with >= 2 positives on some dataset.
      const int lo = evaluable ? 1 : 2;
      if (static_cast<int>(cands.size()) < lo) continue;
      int count = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, opt.max_vis_per_dataset - lo + 1))));
      count = std::min<int>(count, static_cast<int>(cands.size()));
      if (count >= 2) evaluable = true;
      for (int k = 0; k < count; ++k) {
        double total = 0.0;
        for (double w : weight) total += w;
        double pick = rng.uniform() * total;
        std::size_t chosen = 0;
        for (; chosen + 1 < weight.size(); ++chosen) {
          if (weight[chosen] <= 0.0) continue;
          if (pick < weight[chosen]) break;
          pick -= weight[chosen];
        }
        while (weight[chosen] <= 0.0 && chosen > 0) --chosen;
        weight[chosen] = 0.0;
        const Candidate& c = cands[chosen];
        const Template& t = tmpl[static_cast<std::size_t>(c.config_id)];
        VisualizationSpec vis;
        vis.user_id = i;
        vis.dataset_id = ds.dataset_id;
        vis.attribute_ids = c.attribute_ids;
        vis.design.mark = t.mark;
        vis.design.x_aggregate = t.x_agg;
        vis.design.y_aggregate = t.y_agg;
        std::size_t slot = 0;
        for (std::size_t ch = 0; ch < kNumDataChannels; ++ch)
          if (t.types[ch]) vis.design.bound[ch] = c.attribute_ids[slot++];
        const double f = rng.uniform();
        vis.feedback = f < 0.7 ? FeedbackKind::generated
                     : f < 0.85 ? FeedbackKind::clicked
                     : f < 0.95 ? FeedbackKind::liked
                                : FeedbackKind::added_to_dashboard;
        vis.config_id = corpus.registry.intern(abstract_configuration(vis, corpus));
        template_to_config.emplace(c.config_id, vis.config_id);
        corpus.visualizations.push_back(std::move(vis));
      }
    }
  }

  result.truth.user_latent = user_latent;
  result.truth.kind_latent = kind_latent;
  result.truth.config_latent = Matrix::Zero(static_cast<Eigen::Index>(corpus.num_configs()), rank);
  for (const auto& [t, c] : template_to_config) result.truth.config_latent.row(c) = template_latent.row(t);
  result.truth.attribute_kind = std::move(attribute_kind);
  result.truth.attribute_latent = attr_latent;
  return result;
}

inline Corpus generate_synthetic_corpus(std::uint64_t seed, int n_users, int n_datasets,
                                        int cols_per_dataset, int planted_rank) {
  SynthOptions opt;
  opt.seed = seed;
  opt.num_users = n_users;
  opt.num_datasets = n_datasets;
  opt.cols_per_dataset = cols_per_dataset;
  opt.planted_rank = planted_rank;
  return generate_synthetic_corpus_with_truth(opt).corpus;
}

}  // namespace pvis
