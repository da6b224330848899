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

// Trains PVisRec on a small synthetic corpus and prints the top
// visualizations for one user on a dataset the user has worked with.

#include <cstdio>
#include <string>

#include "pvis/pvis.hpp"

int main() {
  using namespace pvis;

  SynthOptions opt = default_run_synthetic();
  opt.num_users = 50;
  opt.num_datasets = 12;
  const Corpus corpus = generate_synthetic_corpus_with_truth(opt).corpus;

  const Matrix M = build_meta_feature_matrix(corpus).M;
  const InteractionGraphs graphs = build_graphs(corpus);
  const EmbeddingSet E = als_fit(graphs, M, TrainConfig{});

  const int user = 0;
  int dataset = -1;
  for (const auto& vis : corpus.visualizations) {
    if (vis.user_id == user) {
      dataset = vis.dataset_id;
      break;
    }
  }
  if (dataset < 0) {
    std::fprintf(stderr, "user %d has no visualizations\n", user);
    return 1;
  }

  const CandidateIndex index(corpus, 3);
  const auto ranked = rank_visualizations(E, user, index.of(dataset));
  std::printf("user %d, dataset %d: %zu candidates\n", user, dataset, ranked.size());
  for (std::size_t i = 0; i < std::min<std::size_t>(ranked.size(), 5); ++i) {
    const Candidate& c = ranked[i];
    std::string attrs;
    for (int a : c.attribute_ids) attrs += (attrs.empty() ? "" : ", ") + corpus.attribute(a).name;
    std::printf("%zu. score %.4f  [%s]  %s\n", i + 1, score_visualization(E, user, c), attrs.c_str(),
                corpus.registry.at(c.config_id).canonical().c_str());
  }
  return 0;
}
