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

// Reference scorers: popularity, item-neighborhood, popularity-weighted ALS,
// the user-centroid model and a random ranker.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pvis/common.hpp"
#include "pvis/corpus.hpp"
#include "pvis/factorization.hpp"
#include "pvis/graphs.hpp"

namespace pvis {

// Scores a slate of candidates for one user. Every model in the evaluation
// harness is wrapped in one of these.
using SlateScorer = std::function<std::vector<double>(int user, std::span<const Candidate> slate)>;

// Lifts a per-candidate scorer to a slate scorer.
template <typename F>
SlateScorer per_candidate(F f) {
  return [f = std::move(f)](int user, std::span<const Candidate> slate) {
    std::vector<double> out;
    out.reserve(slate.size());
    for (const auto& c : slate) out.push_back(f(user, c));
    return out;
  };
}

// ---------------------------------------------------------------------------
// VisPop.

struct FrequencyTables {
  Vector attr_freq;    // column sums of A
  Vector config_freq;  // column sums of C
};

inline FrequencyTables frequency_tables(const InteractionGraphs& g) {
  FrequencyTables ft{Vector::Zero(g.num_attributes()), Vector::Zero(g.num_configs())};
  for (const auto& t : g.A.entries()) ft.attr_freq[t.col] += t.value;
  for (const auto& t : g.C.entries()) ft.config_freq[t.col] += t.value;
  return ft;
}

// f(config) times the product of f(attribute); zero if any part is unseen.
inline double vispop_score(const FrequencyTables& ft, std::span<const int> attributes, int config) {
  double s = ft.config_freq[config];
  for (int a : attributes) s *= ft.attr_freq[a];
  return s;
}

inline double vispop_score(const FrequencyTables& ft, const Candidate& c) {
  return vispop_score(ft, c.attribute_ids, c.config_id);
}

// ---------------------------------------------------------------------------
// Item neighborhoods over the columns of a user x item matrix.

inline constexpr int kDefaultNeighbors = 10;

class ItemKnn {
 public:
  struct Neighbor {
    int item;
    double similarity;
  };

  ItemKnn() = default;
  ItemKnn(const SparseMatrix& R, int k_nn) : R_(R), k_(k_nn) {
    if (k_nn < 1) throw ArgumentError("k_nn must be >= 1");
    const int m = R.cols();
    Vector norm2 = Vector::Zero(m);
    for (const auto& t : R.entries()) norm2[t.col] += t.value * t.value;
    neighbors_.resize(static_cast<std::size_t>(m));
    std::vector<double> dot(static_cast<std::size_t>(m), 0.0);
    std::vector<int> touched;
    for (int j = 0; j < m; ++j) {
      if (norm2[j] <= 0) continue;
      // co-occurrence dot products through the users of column j
      R.for_col(j, [&](int user, double rj) {
        R.for_row(user, [&](int other, double ro) {
          if (dot[static_cast<std::size_t>(other)] == 0.0) touched.push_back(other);
          dot[static_cast<std::size_t>(other)] += rj * ro;
        });
      });
      std::vector<Neighbor> cand;
      for (int o : touched) {
        const double sim = dot[static_cast<std::size_t>(o)] / std::sqrt(norm2[j] * norm2[o]);
        if (sim > 0) cand.push_back({o, sim});
        dot[static_cast<std::size_t>(o)] = 0.0;
      }
      touched.clear();
      const auto keep = std::min<std::size_t>(cand.size(), static_cast<std::size_t>(k_nn));
      std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(keep), cand.end(),
                        [](const Neighbor& a, const Neighbor& b) {
                          return a.similarity != b.similarity ? a.similarity > b.similarity : a.item < b.item;
                        });
      cand.resize(keep);
      neighbors_[static_cast<std::size_t>(j)] = std::move(cand);
    }
  }

  // Most similar items (the item itself included), by descending cosine.
  const std::vector<Neighbor>& neighbors(int item) const { return neighbors_[static_cast<std::size_t>(item)]; }

  // Mean of sim(item, n) * [user consumed n] over the neighborhood of item.
  double estimate(int user, int item) const {
    const auto& nb = neighbors(item);
    if (nb.empty()) return 0.0;
    double s = 0.0;
    for (const auto& n : nb)
      if (R_.at(user, n.item) > 0) s += n.similarity;
    return s / static_cast<double>(nb.size());
  }

  int k() const { return k_; }

 private:
  SparseMatrix R_;
  int k_ = kDefaultNeighbors;
  std::vector<std::vector<Neighbor>> neighbors_;
};

struct VisKnnModel {
  ItemKnn config_knn;  // over columns of C
  ItemKnn attr_knn;    // over columns of A
};

inline VisKnnModel fit_visknn(const InteractionGraphs& g, int k_nn = kDefaultNeighbors) {
  return {ItemKnn(g.C, k_nn), ItemKnn(g.A, k_nn)};
}

// Average of the configuration estimate and the mean attribute estimate.
inline double visknn_score(const VisKnnModel& m, int user, std::span<const int> attributes, int config) {
  const double cfg = m.config_knn.estimate(user, config);
  if (attributes.empty()) return cfg;
  double attr = 0.0;
  for (int a : attributes) attr += m.attr_knn.estimate(user, a);
  return 0.5 * (cfg + attr / static_cast<double>(attributes.size()));
}

inline double visknn_score(const VisKnnModel& m, int user, const Candidate& c) {
  return visknn_score(m, user, c.attribute_ids, c.config_id);
}

inline double visconfigknn_score(const ItemKnn& config_knn, int user, const Candidate& c) {
  return config_knn.estimate(user, c.config_id);
}

// ---------------------------------------------------------------------------
// eALS: ALS on a binarized user x item matrix where every unobserved cell is
// a weighted zero, with weight proportional to item popularity.

struct EalsConfig {
  int d = 10;
  double lambda = 1e-2;
  int max_iters = 20;
  double c = 512.0;  // total negative weight
  double tol = 1e-5;
  std::uint64_t seed = 1;

  void validate() const {
    if (d < 1) throw ArgumentError("d must be >= 1");
    if (!(lambda >= 0)) throw ArgumentError("lambda must be >= 0");
    if (max_iters < 0) throw ArgumentError("max_iters must be >= 0");
    if (!(c > 0)) throw ArgumentError("c must be > 0");
  }
};

struct WeightedFactors {
  Matrix P;  // users x d
  Matrix Q;  // items x d
  Vector w;  // per-item weight of unobserved cells
};

// w_j = c * pop_j / sum(pop), pop_j = number of users with a nonzero in j.
inline Vector popularity_weights(const SparseMatrix& R, double c) {
  Vector pop = Vector::Zero(R.cols());
  for (const auto& t : R.entries()) pop[t.col] += 1.0;
  const double total = pop.sum();
  if (total <= 0) return Vector::Constant(R.cols(), R.cols() > 0 ? c / R.cols() : 0.0);
  return c * pop / total;
}

// sum over observed cells of (1 - p.q)^2, plus w_j (p.q)^2 over unobserved
// cells, plus lambda (|P|^2 + |Q|^2).
inline double eals_objective(const SparseMatrix& R, const WeightedFactors& f, double lambda) {
  // all cells as if unobserved, then correct the observed ones
  double obj = 0.0;
  const Matrix G = f.P.transpose() * f.P;
  for (Eigen::Index j = 0; j < f.Q.rows(); ++j) obj += f.w[j] * f.Q.row(j) * G * f.Q.row(j).transpose();
  for (const auto& t : R.entries()) {
    const double p = f.P.row(t.row).dot(f.Q.row(t.col));
    obj += (1.0 - p) * (1.0 - p) - f.w[t.col] * p * p;
  }
  return obj + lambda * (f.P.squaredNorm() + f.Q.squaredNorm());
}

namespace eals_detail {

inline RowVector solve_row(Matrix lhs, const Vector& rhs, const char* what, int iter) {
  Eigen::LLT<Matrix> llt(lhs);
  if (llt.info() != Eigen::Success)
    throw NumericalError(std::string("Cholesky failed updating ") + what + " at iteration " + std::to_string(iter));
  Vector x = llt.solve(rhs);
  if (!x.allFinite())
    throw NumericalError(std::string("non-finite values updating ") + what + " at iteration " + std::to_string(iter));
  return x.transpose();
}

}  // namespace eals_detail

// Exact row-wise ALS. Each row solve minimizes the objective in that row, so
// the objective never increases. `trace` (optional) receives the objective
// after every half-sweep, preceded by the initial value.
inline WeightedFactors eals_fit_matrix(const SparseMatrix& R, const EalsConfig& cfg,
                                       std::vector<double>* trace = nullptr) {
  cfg.validate();
  const int n = R.rows(), m = R.cols(), d = cfg.d;
  Rng rng(cfg.seed);
  WeightedFactors f{Matrix(n, d), Matrix(m, d), popularity_weights(R, cfg.c)};
  for (auto& v : f.P.reshaped()) v = rng.uniform(-0.01, 0.01);
  for (auto& v : f.Q.reshaped()) v = rng.uniform(-0.01, 0.01);
  const Matrix I = cfg.lambda * Matrix::Identity(d, d);
  double prev = eals_objective(R, f, cfg.lambda);
  if (trace) trace->push_back(prev);
  for (int it = 1; it <= cfg.max_iters; ++it) {
    // users: sum_j w_j q_j q_j^T over all items, corrected on observed items
    const Matrix Sq = f.Q.transpose() * f.w.asDiagonal() * f.Q;
    for (int i = 0; i < n; ++i) {
      Matrix lhs = Sq + I;
      Vector rhs = Vector::Zero(d);
      R.for_row(i, [&](int j, double) {
        const auto q = f.Q.row(j);
        lhs.noalias() += (1.0 - f.w[j]) * q.transpose() * q;
        rhs += q.transpose();
      });
      f.P.row(i) = eals_detail::solve_row(lhs, rhs, "P", it);
    }
    if (trace) trace->push_back(eals_objective(R, f, cfg.lambda));
    const Matrix Sp = f.P.transpose() * f.P;
    for (int j = 0; j < m; ++j) {
      Matrix lhs = f.w[j] * Sp + I;
      Vector rhs = Vector::Zero(d);
      R.for_col(j, [&](int i, double) {
        const auto p = f.P.row(i);
        lhs.noalias() += (1.0 - f.w[j]) * p.transpose() * p;
        rhs += p.transpose();
      });
      f.Q.row(j) = eals_detail::solve_row(lhs, rhs, "Q", it);
    }
    const double obj = eals_objective(R, f, cfg.lambda);
    if (trace) trace->push_back(obj);
    if (std::abs(prev - obj) <= cfg.tol * std::abs(prev)) break;
    prev = obj;
  }
  return f;
}

struct EalsModel {
  WeightedFactors attr;    // fitted on A
  WeightedFactors config;  // fitted on C
};

inline EalsModel eals_fit(const InteractionGraphs& g, const EalsConfig& cfg) {
  return {eals_fit_matrix(g.A.binarized(), cfg), eals_fit_matrix(g.C.binarized(), cfg)};
}

// Product rule with the two independent factorizations.
inline double eals_score(const EalsModel& m, int user, std::span<const int> attributes, int config) {
  double s = m.config.P.row(user).dot(m.config.Q.row(config));
  for (int a : attributes) s *= m.attr.P.row(user).dot(m.attr.Q.row(a));
  return s;
}

inline double eals_score(const EalsModel& m, int user, const Candidate& c) {
  return eals_score(m, user, c.attribute_ids, c.config_id);
}

inline void save_eals(const EalsModel& m, const std::string& path) {
  auto out = binio::open_out(path);
  binio::write_header(out, "PVEA", 1);
  for (const auto* f : {&m.attr, &m.config}) {
    binio::write_matrix(out, f->P);
    binio::write_matrix(out, f->Q);
    binio::write_matrix(out, f->w);
  }
  if (!out) throw Error("failed writing '" + path + "'");
}

inline EalsModel load_eals(const std::string& path) {
  auto in = binio::open_in(path);
  binio::read_header(in, "PVEA", 1);
  EalsModel m;
  for (auto* f : {&m.attr, &m.config}) {
    f->P = binio::read_matrix(in);
    f->Q = binio::read_matrix(in);
    f->w = binio::read_matrix(in);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Non-personalized centroid model and the random ranker.

inline RowVector user_centroid(const EmbeddingSet& E) {
  if (E.U.rows() == 0) throw ArgumentError("no users to average");
  return E.U.colwise().mean();
}

inline double global_centroid_score(const EmbeddingSet& E, const RowVector& centroid, const Candidate& c) {
  double s = centroid.dot(E.Z.row(c.config_id));
  for (int a : c.attribute_ids) s *= centroid.dot(E.V.row(a));
  return s;
}

inline double global_centroid_score(const EmbeddingSet& E, const Candidate& c) {
  return global_centroid_score(E, user_centroid(E), c);
}

// Uniform in [0, 1), a pure function of (seed, user, candidate).
inline double random_score(std::uint64_t seed, int user, const Candidate& c) {
  Fnv1a h;
  h.update_u64(static_cast<std::uint64_t>(user)).update_u64(static_cast<std::uint64_t>(c.config_id));
  for (int a : c.attribute_ids) h.update_u64(static_cast<std::uint64_t>(a));
  return static_cast<double>(mix_seed(seed, h.digest()) >> 11) * 0x1.0p-53;
}

}  // namespace pvis
