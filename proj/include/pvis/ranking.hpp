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

// Deterministic ordering of scored candidate slates and the top-K metrics.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "pvis/common.hpp"
#include "pvis/corpus.hpp"

namespace pvis {

// Tie-break order: config id, then attribute ids lexicographically.
inline bool tie_break_less(const Candidate& a, const Candidate& b) {
  if (a.config_id != b.config_id) return a.config_id < b.config_id;
  return a.attribute_ids < b.attribute_ids;
}

// Indices of `candidates` sorted by descending score; NaN ranks last.
inline std::vector<std::size_t> order_by_score(std::span<const Candidate> candidates, std::span<const double> scores) {
  if (candidates.size() != scores.size()) throw ArgumentError("one score per candidate required");
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) { return std::isnan(scores[i]) ? -INFINITY : scores[i]; };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double sa = key(a), sb = key(b);
    if (sa != sb) return sa > sb;
    if (tie_break_less(candidates[a], candidates[b])) return true;
    if (tie_break_less(candidates[b], candidates[a])) return false;
    return a < b;
  });
  return order;
}

// 1-based rank of candidate `target` within the slate.
inline int rank_of(std::span<const Candidate> candidates, std::span<const double> scores, std::size_t target) {
  const auto order = order_by_score(candidates, scores);
  return static_cast<int>(std::find(order.begin(), order.end(), target) - order.begin()) + 1;
}

inline double hit_rate_at(int rank, int k) { return rank <= k ? 1.0 : 0.0; }

inline double ndcg_at(int rank, int k) { return rank <= k ? 1.0 / std::log2(static_cast<double>(rank) + 1.0) : 0.0; }

}  // namespace pvis
