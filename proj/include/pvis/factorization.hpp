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

// Collective matrix factorization over the preference graphs and the
// meta-feature matrix:
//
//   f = |A - U V'|^2 + |M - Y V'|^2 + |C - U Z'|^2 + |D - V Z'|^2
//       + lambda (|U|^2 + |V|^2 + |Z|^2 + |Y|^2)
//
// fitted by alternating least squares. Unobserved cells count as zeros, so
// every factor update is a single shared d x d ridge solve.

#include <Eigen/Cholesky>

#include <algorithm>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pvis/common.hpp"
#include "pvis/graphs.hpp"
#include "pvis/ranking.hpp"

namespace pvis {

// full: all four terms; acm: drops D; acd: drops M (and Y).
enum class Variant { full, acm, acd };
inline constexpr std::array<std::string_view, 3> kVariantNames = {"full", "acm", "acd"};

inline std::string_view to_string(Variant v) { return kVariantNames[static_cast<int>(v)]; }

inline Variant parse_variant(std::string_view s) {
  for (std::size_t i = 0; i < kVariantNames.size(); ++i)
    if (kVariantNames[i] == s) return static_cast<Variant>(i);
  throw ArgumentError("unknown variant '" + std::string(s) + "' (expected full, acm or acd)");
}

inline bool uses_meta(Variant v) { return v != Variant::acd; }
inline bool uses_d(Variant v) { return v != Variant::acm; }

struct TrainConfig {
  int d = 10;
  double lambda = 1e-2;
  int max_iters = 50;
  double tol = 1e-5;
  std::uint64_t seed = 1;
  Variant variant = Variant::full;

  void validate() const {
    if (d < 1) throw ArgumentError("d must be >= 1");
    if (!(lambda >= 0)) throw ArgumentError("lambda must be >= 0");
    if (max_iters < 0) throw ArgumentError("max_iters must be >= 0");
    if (!(tol >= 0)) throw ArgumentError("tol must be >= 0");
  }
};

struct EmbeddingSet {
  Matrix U;  // n x d
  Matrix V;  // m x d
  Matrix Z;  // h x d
  Matrix Y;  // K x d; empty for the acd variant
  Variant variant = Variant::full;

  int d() const { return static_cast<int>(U.cols()); }
  bool has_y() const { return Y.size() > 0; }
};

// ---------------------------------------------------------------------------
// Objective.

namespace cmf_detail {

// |S - P Q'|^2 = |S|^2 - 2 sum_{(i,j) in S} S_ij <P_i, Q_j> + tr(P'P Q'Q)
inline double sparse_term(const SparseMatrix& S, const Matrix& P, const Matrix& Q) {
  double cross = 0.0;
  for (const auto& t : S.entries()) cross += t.value * P.row(t.row).dot(Q.row(t.col));
  const Matrix pp = P.transpose() * P, qq = Q.transpose() * Q;
  return S.squared_norm() - 2.0 * cross + (pp.cwiseProduct(qq)).sum();
}

inline double dense_term(const Matrix& M, const Matrix& Y, const Matrix& V) {
  const Matrix mv = M * V;  // K x d
  const Matrix yy = Y.transpose() * Y, vv = V.transpose() * V;
  return M.squaredNorm() - 2.0 * mv.cwiseProduct(Y).sum() + yy.cwiseProduct(vv).sum();
}

inline void check_shapes(const InteractionGraphs& g, const Matrix& M, const EmbeddingSet& E) {
  const auto d = E.U.cols();
  auto fail = [](const std::string& what) { throw ArgumentError("shape mismatch: " + what); };
  if (E.U.rows() != g.num_users()) fail("U rows != users");
  if (E.V.rows() != g.num_attributes()) fail("V rows != attributes");
  if (E.Z.rows() != g.num_configs()) fail("Z rows != configurations");
  if (E.V.cols() != d || E.Z.cols() != d) fail("factor ranks differ");
  if (g.D.rows() != g.num_attributes() || g.D.cols() != g.num_configs()) fail("D shape");
  if (uses_meta(E.variant)) {
    if (M.cols() != g.num_attributes()) fail("M columns != attributes");
    if (E.Y.rows() != M.rows() || E.Y.cols() != d) fail("Y shape");
  }
}

}  // namespace cmf_detail

inline double objective(const InteractionGraphs& g, const Matrix& M, const EmbeddingSet& E, double lambda = 0.0) {
  cmf_detail::check_shapes(g, M, E);
  double f = cmf_detail::sparse_term(g.A, E.U, E.V) + cmf_detail::sparse_term(g.C, E.U, E.Z);
  if (uses_d(E.variant)) f += cmf_detail::sparse_term(g.D, E.V, E.Z);
  if (uses_meta(E.variant)) f += cmf_detail::dense_term(M, E.Y, E.V);
  double reg = E.U.squaredNorm() + E.V.squaredNorm() + E.Z.squaredNorm();
  if (uses_meta(E.variant)) reg += E.Y.squaredNorm();
  return f + lambda * reg;
}

// ---------------------------------------------------------------------------
// ALS.

inline EmbeddingSet init_embeddings(const InteractionGraphs& g, const Matrix& M, const TrainConfig& cfg) {
  Rng rng(cfg.seed);
  auto fill = [&](Eigen::Index rows) {
    Matrix X(rows, cfg.d);
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      for (Eigen::Index i = 0; i < X.rows(); ++i) X(i, j) = rng.uniform(-0.01, 0.01);
    return X;
  };
  EmbeddingSet E;
  E.variant = cfg.variant;
  E.U = fill(g.num_users());
  E.V = fill(g.num_attributes());
  E.Z = fill(g.num_configs());
  if (uses_meta(cfg.variant)) E.Y = fill(M.rows());
  return E;
}

struct FitTrace {
  std::vector<double> iteration_objective;  // after each full sweep; [0] is the initial value
  std::vector<double> update_objective;     // after each single-factor update (when requested)
  int iterations = 0;
  bool converged = false;
};

struct FitOptions {
  bool trace_updates = false;  // evaluate the objective after every factor update
  std::function<void(int, double)> on_iteration;
};

namespace cmf_detail {

// X <- rhs (gram + lambda I)^{-1}
inline void ridge_solve(Matrix& X, const Matrix& rhs, Matrix gram, double lambda, const char* factor, int iteration) {
  gram.diagonal().array() += lambda;
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success)
    throw NumericalError(std::string("Cholesky failed updating ") + factor + " at iteration " +
                         std::to_string(iteration) + " (increase lambda or reduce d)");
  X = llt.solve(rhs.transpose()).transpose();
  if (!X.allFinite())
    throw NumericalError(std::string("non-finite values updating ") + factor + " at iteration " +
                         std::to_string(iteration));
}

}  // namespace cmf_detail

inline EmbeddingSet als_fit(const InteractionGraphs& g, const Matrix& M, const TrainConfig& cfg,
                            FitTrace* trace = nullptr, const FitOptions& opt = {}) {
  cfg.validate();
  EmbeddingSet E = init_embeddings(g, M, cfg);
  cmf_detail::check_shapes(g, M, E);
  const bool meta = uses_meta(cfg.variant), dterm = uses_d(cfg.variant);
  const double lam = cfg.lambda;
  double prev = objective(g, M, E, lam);
  if (trace) {
    *trace = {};
    trace->iteration_objective.push_back(prev);
  }
  auto record_update = [&] {
    if (trace && opt.trace_updates) trace->update_objective.push_back(objective(g, M, E, lam));
  };
  for (int it = 1; it <= cfg.max_iters; ++it) {
    {
      const Matrix rhs = g.A.multiply(E.V) + g.C.multiply(E.Z);
      cmf_detail::ridge_solve(E.U, rhs, E.V.transpose() * E.V + E.Z.transpose() * E.Z, lam, "U", it);
      record_update();
    }
    {
      Matrix rhs = g.A.transpose_multiply(E.U);
      Matrix gram = E.U.transpose() * E.U;
      if (meta) {
        rhs += M.transpose() * E.Y;
        gram += E.Y.transpose() * E.Y;
      }
      if (dterm) {
        rhs += g.D.multiply(E.Z);
        gram += E.Z.transpose() * E.Z;
      }
      cmf_detail::ridge_solve(E.V, rhs, gram, lam, "V", it);
      record_update();
    }
    {
      Matrix rhs = g.C.transpose_multiply(E.U);
      Matrix gram = E.U.transpose() * E.U;
      if (dterm) {
        rhs += g.D.transpose_multiply(E.V);
        gram += E.V.transpose() * E.V;
      }
      cmf_detail::ridge_solve(E.Z, rhs, gram, lam, "Z", it);
      record_update();
    }
    if (meta) {
      cmf_detail::ridge_solve(E.Y, M * E.V, E.V.transpose() * E.V, lam, "Y", it);
      record_update();
    }
    const double f = objective(g, M, E, lam);
    if (!std::isfinite(f)) throw NumericalError("objective became non-finite at iteration " + std::to_string(it));
    if (opt.on_iteration) opt.on_iteration(it, f);
    if (trace) {
      trace->iteration_objective.push_back(f);
      trace->iterations = it;
    }
    const bool done = std::abs(prev - f) <= cfg.tol * std::max(std::abs(prev), 1e-300);
    prev = f;
    if (done) {
      if (trace) trace->converged = true;
      break;
    }
  }
  return E;
}

// ---------------------------------------------------------------------------
// Scoring and recommendation.

// (U_i . Z_t) * prod_j (U_i . V_j)
inline double score_visualization(const EmbeddingSet& E, int user, std::span<const int> attributes, int config) {
  if (attributes.empty()) throw ArgumentError("visualization must bind at least one attribute");
  const auto u = E.U.row(user);
  double s = u.dot(E.Z.row(config));
  for (int j : attributes) s *= u.dot(E.V.row(j));
  return s;
}

inline double score_visualization(const EmbeddingSet& E, int user, const Candidate& c) {
  return score_visualization(E, user, c.attribute_ids, c.config_id);
}

struct Scored {
  int id = 0;
  double score = 0.0;
};

namespace cmf_detail {

inline std::vector<Scored> top_k(const Vector& scores, int k) {
  if (k < 1) throw ArgumentError("k must be >= 1");
  std::vector<Scored> all(static_cast<std::size_t>(scores.size()));
  for (Eigen::Index i = 0; i < scores.size(); ++i) all[i] = {static_cast<int>(i), scores[i]};
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(k), all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(),
                    [](const Scored& a, const Scored& b) { return a.score != b.score ? a.score > b.score : a.id < b.id; });
  all.resize(n);
  return all;
}

}  // namespace cmf_detail

// Attributes ranked by U_i V'.
inline std::vector<Scored> recommend_attributes(const EmbeddingSet& E, int user, int k) {
  return cmf_detail::top_k(E.V * E.U.row(user).transpose(), k);
}

// Configurations ranked by U_i Z'.
inline std::vector<Scored> recommend_configs(const EmbeddingSet& E, int user, int k) {
  return cmf_detail::top_k(E.Z * E.U.row(user).transpose(), k);
}

inline std::vector<Candidate> rank_visualizations(const EmbeddingSet& E, int user, std::span<const Candidate> candidates) {
  if (candidates.empty()) throw ArgumentError("cannot rank an empty slate");
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& c : candidates) scores.push_back(score_visualization(E, user, c));
  std::vector<Candidate> out;
  for (auto i : order_by_score(candidates, scores)) out.push_back(candidates[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Model container: "PVMD", version, config, factors.

inline void write_model(std::ostream& out, const EmbeddingSet& E, const TrainConfig& cfg) {
  binio::write_header(out, "PVMD", 1);
  binio::write_u64(out, static_cast<std::uint64_t>(cfg.d));
  binio::write_f64(out, cfg.lambda);
  binio::write_u64(out, static_cast<std::uint64_t>(cfg.max_iters));
  binio::write_f64(out, cfg.tol);
  binio::write_u64(out, cfg.seed);
  binio::write_string(out, to_string(cfg.variant));
  binio::write_matrix(out, E.U);
  binio::write_matrix(out, E.V);
  binio::write_matrix(out, E.Z);
  binio::write_matrix(out, E.Y);
}

inline EmbeddingSet read_model(std::istream& in, TrainConfig* cfg_out = nullptr) {
  binio::read_header(in, "PVMD", 1);
  TrainConfig cfg;
  cfg.d = static_cast<int>(binio::read_u64(in));
  cfg.lambda = binio::read_f64(in);
  cfg.max_iters = static_cast<int>(binio::read_u64(in));
  cfg.tol = binio::read_f64(in);
  cfg.seed = binio::read_u64(in);
  cfg.variant = parse_variant(binio::read_string(in));
  EmbeddingSet E;
  E.variant = cfg.variant;
  E.U = binio::read_matrix(in);
  E.V = binio::read_matrix(in);
  E.Z = binio::read_matrix(in);
  E.Y = binio::read_matrix(in);
  if (E.U.cols() != cfg.d || E.V.cols() != cfg.d || E.Z.cols() != cfg.d)
    throw ParseError("model container factors disagree with the stored rank");
  if (cfg_out) *cfg_out = cfg;
  return E;
}

inline void save_model(const EmbeddingSet& E, const TrainConfig& cfg, const std::string& path) {
  auto out = binio::open_out(path);
  write_model(out, E, cfg);
  if (!out) throw Error("failed writing '" + path + "'");
}

inline EmbeddingSet load_model(const std::string& path, TrainConfig* cfg = nullptr) {
  auto in = binio::open_in(path);
  return read_model(in, cfg);
}

}  // namespace pvis
