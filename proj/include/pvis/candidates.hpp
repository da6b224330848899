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

// Per-dataset cache of the enumerated candidate visualization space, plus the
// negative sampler shared by training and evaluation.

#include <map>
#include <set>
#include <vector>

#include "pvis/common.hpp"
#include "pvis/corpus.hpp"

namespace pvis {

class CandidateIndex {
 public:
  CandidateIndex(const Corpus& corpus, int max_attrs) : corpus_(&corpus), max_attrs_(max_attrs) {
    if (max_attrs < 1) throw ArgumentError("max_attrs must be >= 1");
  }

  // Enumerated once per dataset, in enumeration order.
  const std::vector<Candidate>& of(int dataset_id) const {
    auto it = cache_.find(dataset_id);
    if (it != cache_.end()) return it->second;
    std::vector<Candidate> all;
    enumerate_candidate_visualizations(corpus_->dataset(dataset_id), corpus_->registry.configs(), max_attrs_,
                                       [&](const Candidate& c) {
                                         all.push_back(c);
                                         return true;
                                       });
    return cache_.emplace(dataset_id, std::move(all)).first->second;
  }

  int max_attrs() const { return max_attrs_; }
  const Corpus& corpus() const { return *corpus_; }

 private:
  const Corpus* corpus_;
  int max_attrs_;
  mutable std::map<int, std::vector<Candidate>> cache_;
};

// Uniform sample of up to `count` distinct candidates of the dataset that are
// not in `exclude`, drawn by reservoir sampling over the enumeration.
inline std::vector<Candidate> sample_negatives(const std::vector<Candidate>& space, const std::set<Candidate>& exclude,
                                               std::size_t count, Rng& rng) {
  std::vector<Candidate> reservoir;
  std::uint64_t seen = 0;
  for (const auto& c : space) {
    if (exclude.count(c)) continue;
    ++seen;
    if (reservoir.size() < count) {
      reservoir.push_back(c);
    } else {
      const auto j = rng.below(seen);
      if (j < count) reservoir[j] = c;
    }
  }
  return reservoir;
}

}  // namespace pvis
