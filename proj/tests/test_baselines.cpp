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

#include <cmath>
#include <filesystem>
#include <map>

#include "pvis/baselines.hpp"
#include "pvis/candidates.hpp"
#include "pvis/ranking.hpp"
#include "pvis/synth.hpp"

namespace pvis {
namespace {

SparseMatrix dense_to_sparse(const Matrix& X) {
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      if (X(i, j) > 0) t.push_back({static_cast<int>(i), static_cast<int>(j), X(i, j)});
  return SparseMatrix::from_triplets(static_cast<int>(X.rows()), static_cast<int>(X.cols()), t);
}

// 3 users x 3 configurations:
//   u0: c0 c1    u1: c0    u2: c1 c2
// cos(c0,c1) = 1/2, cos(c0,c2) = 0, cos(c1,c2) = 1/sqrt(2)
Matrix three_user_configs() {
  Matrix C(3, 3);
  C << 1, 1, 0,
       1, 0, 0,
       0, 1, 1;
  return C;
}

TEST(VisPop, FrequencyProduct) {
  FrequencyTables ft{Vector::Zero(6), Vector::Zero(4)};
  ft.config_freq[1] = 3;
  ft.attr_freq[2] = 2;
  ft.attr_freq[4] = 5;
  const std::vector<int> seen{2, 4}, unseen{2, 3};
  EXPECT_DOUBLE_EQ(vispop_score(ft, seen, 1), 30.0);
  EXPECT_DOUBLE_EQ(vispop_score(ft, unseen, 1), 0.0);
}

TEST(VisPop, TablesMatchRawRecountAndRankingIsUserInvariant) {
  const Corpus corpus = generate_synthetic_corpus(21, 40, 15, 6, 3);
  const FrequencyTables ft = frequency_tables(build_graphs(corpus));
  std::map<int, double> attr, cfg;
  for (const auto& v : corpus.visualizations) {
    cfg[v.config_id] += 1;
    for (int a : v.attribute_ids) attr[a] += 1;
  }
  for (int j = 0; j < ft.attr_freq.size(); ++j) EXPECT_EQ(ft.attr_freq[j], attr.count(j) ? attr[j] : 0.0);
  for (int t = 0; t < ft.config_freq.size(); ++t) EXPECT_EQ(ft.config_freq[t], cfg.count(t) ? cfg[t] : 0.0);

  const CandidateIndex index(corpus, 3);
  const auto& slate = index.of(0);
  const auto scorer = per_candidate([&](int, const Candidate& c) { return vispop_score(ft, c); });
  EXPECT_EQ(scorer(0, slate), scorer(7, slate));
  const auto scores = scorer(0, slate);
  for (std::size_t i = 0; i < slate.size(); ++i) {
    double expect = cfg.count(slate[i].config_id) ? cfg[slate[i].config_id] : 0.0;
    for (int a : slate[i].attribute_ids) expect *= attr.count(a) ? attr[a] : 0.0;
    EXPECT_EQ(scores[i], expect);
  }
}

TEST(ItemKnn, ThreeUserNeighborhoodsByHand) {
  const ItemKnn knn(dense_to_sparse(three_user_configs()), 2);
  ASSERT_EQ(knn.neighbors(0).size(), 2u);
  EXPECT_EQ(knn.neighbors(0)[0].item, 0);
  EXPECT_NEAR(knn.neighbors(0)[1].similarity, 0.5, 1e-15);
  EXPECT_EQ(knn.neighbors(1)[1].item, 2);
  EXPECT_NEAR(knn.neighbors(1)[1].similarity, std::sqrt(0.5), 1e-15);

  EXPECT_NEAR(knn.estimate(1, 0), 0.5, 1e-15);
  EXPECT_NEAR(knn.estimate(1, 1), 0.0, 1e-15);
  EXPECT_NEAR(knn.estimate(0, 2), std::sqrt(0.5) / 2, 1e-15);
  EXPECT_NEAR(knn.estimate(2, 0), 0.25, 1e-15);
  EXPECT_THROW(ItemKnn(dense_to_sparse(three_user_configs()), 0), ArgumentError);
}

TEST(VisKnn, ConsumedConfigPositiveAndEmptyHistoryZero) {
  Matrix A(4, 3), C(4, 3);
  A << 1, 1, 0,
       1, 0, 0,
       0, 1, 1,
       0, 0, 0;
  C.topRows(3) = three_user_configs();
  C.row(3).setZero();
  const InteractionGraphs g{dense_to_sparse(A), dense_to_sparse(C), SparseMatrix(3, 3)};
  const VisKnnModel m = fit_visknn(g, 2);
  const Candidate consumed{{0}, 1}, any{{1, 2}, 2};
  EXPECT_GT(visknn_score(m, 0, consumed), 0.0);
  EXPECT_GT(visconfigknn_score(m.config_knn, 0, consumed), 0.0);
  EXPECT_EQ(visknn_score(m, 3, consumed), 0.0);
  EXPECT_EQ(visconfigknn_score(m.config_knn, 3, any), 0.0);
  // user 2, config 2 and attributes {1, 2}: A has the same pattern as C, so
  // each estimate is (1 + 1/sqrt 2) / 2
  const double e = (1 + std::sqrt(0.5)) / 2;
  EXPECT_NEAR(visknn_score(m, 2, any), 0.5 * (e + e), 1e-15);
  EXPECT_NEAR(visconfigknn_score(m.config_knn, 2, any), e, 1e-15);
}

TEST(Eals, UniformPopularityGivesUniformWeights) {
  Matrix R = Matrix::Identity(4, 4);
  const Vector w = popularity_weights(dense_to_sparse(R), 512.0);
  for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(w[j], 128.0);
}

// Dense weighted ALS with the full weight matrix, from the same initial factors.
WeightedFactors dense_weighted_als(const Matrix& R, const Vector& w, Matrix P, Matrix Q, double lambda, int iters) {
  const Eigen::Index n = R.rows(), m = R.cols(), d = P.cols();
  Matrix W(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) W(i, j) = R(i, j) > 0 ? 1.0 : w[j];
  const Matrix T = (R.array() > 0).cast<double>().matrix();
  for (int it = 0; it < iters; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Matrix lhs = lambda * Matrix::Identity(d, d);
      Vector rhs = Vector::Zero(d);
      for (Eigen::Index j = 0; j < m; ++j) {
        lhs += W(i, j) * Q.row(j).transpose() * Q.row(j);
        rhs += W(i, j) * T(i, j) * Q.row(j).transpose();
      }
      P.row(i) = lhs.ldlt().solve(rhs).transpose();
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      Matrix lhs = lambda * Matrix::Identity(d, d);
      Vector rhs = Vector::Zero(d);
      for (Eigen::Index i = 0; i < n; ++i) {
        lhs += W(i, j) * P.row(i).transpose() * P.row(i);
        rhs += W(i, j) * T(i, j) * P.row(i).transpose();
      }
      Q.row(j) = lhs.ldlt().solve(rhs).transpose();
    }
  }
  return {P, Q, w};
}

TEST(Eals, FourByFourMatchesDenseOracle) {
  Matrix R(4, 4);
  R << 1, 0, 1, 0,
       0, 1, 1, 0,
       1, 1, 0, 1,
       0, 0, 1, 1;
  EalsConfig cfg;
  cfg.d = 2;
  cfg.lambda = 0.1;
  cfg.c = 3.0;
  cfg.max_iters = 6;
  cfg.tol = 0;
  const SparseMatrix S = dense_to_sparse(R);
  const WeightedFactors got = eals_fit_matrix(S, cfg);

  Rng rng(cfg.seed);
  Matrix P(4, 2), Q(4, 2);
  for (auto& v : P.reshaped()) v = rng.uniform(-0.01, 0.01);
  for (auto& v : Q.reshaped()) v = rng.uniform(-0.01, 0.01);
  const WeightedFactors want = dense_weighted_als(R, popularity_weights(S, 3.0), P, Q, 0.1, 6);
  EXPECT_LT((got.P - want.P).norm(), 1e-9);
  EXPECT_LT((got.Q - want.Q).norm(), 1e-9);

  // objective against the dense cell-by-cell sum
  double dense = 0.1 * (want.P.squaredNorm() + want.Q.squaredNorm());
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double p = want.P.row(i).dot(want.Q.row(j));
      dense += R(i, j) > 0 ? (1 - p) * (1 - p) : want.w[j] * p * p;
    }
  EXPECT_NEAR(eals_objective(S, got, 0.1), dense, 1e-9);
}

TEST(Eals, ObjectiveNeverIncreases) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix R(3 + rng.below(8), 3 + rng.below(8));
    for (auto& v : R.reshaped()) v = rng.uniform() < 0.3 ? 1.0 : 0.0;
    EalsConfig cfg;
    cfg.d = 1 + static_cast<int>(rng.below(4));
    cfg.c = 1 + rng.uniform() * 20;
    cfg.seed = rng.next_u64();
    cfg.max_iters = 15;
    cfg.tol = 0;
    std::vector<double> trace;
    eals_fit_matrix(dense_to_sparse(R), cfg, &trace);
    for (std::size_t k = 1; k < trace.size(); ++k) EXPECT_LE(trace[k], trace[k - 1] + 1e-9 * std::abs(trace[k - 1]));
  }
}

TEST(Eals, ScoreUsesProductRuleAndRoundTrips) {
  const Corpus corpus = generate_synthetic_corpus(4, 20, 8, 5, 2);
  EalsConfig cfg;
  cfg.d = 3;
  cfg.max_iters = 5;
  const EalsModel m = eals_fit(build_graphs(corpus), cfg);
  const Candidate c = candidate_of(corpus.visualizations[0]);
  double expect = m.config.P.row(2).dot(m.config.Q.row(c.config_id));
  for (int a : c.attribute_ids) expect *= m.attr.P.row(2).dot(m.attr.Q.row(a));
  EXPECT_DOUBLE_EQ(eals_score(m, 2, c), expect);

  const auto path = (std::filesystem::temp_directory_path() / "pvis_eals_roundtrip.bin").string();
  save_eals(m, path);
  const EalsModel back = load_eals(path);
  std::filesystem::remove(path);
  EXPECT_EQ(eals_score(back, 2, c), eals_score(m, 2, c));
}

EmbeddingSet random_embeddings(Rng& rng, int n, int m, int h, int d) {
  EmbeddingSet E;
  E.U = Matrix(n, d);
  E.V = Matrix(m, d);
  E.Z = Matrix(h, d);
  for (Matrix* X : {&E.U, &E.V, &E.Z})
    for (auto& v : X->reshaped()) v = rng.uniform(-1, 1);
  return E;
}

TEST(GlobalCentroid, SingleUserEqualsPersonalizedScore) {
  Rng rng(41);
  const EmbeddingSet E = random_embeddings(rng, 1, 5, 4, 3);
  const Candidate c{{1, 3}, 2};
  EXPECT_NEAR(global_centroid_score(E, c), score_visualization(E, 0, c), 1e-15);
}

TEST(GlobalCentroid, SharedUserEmbeddingEqualsEveryPersonalizedScore) {
  Rng rng(42);
  EmbeddingSet E = random_embeddings(rng, 6, 5, 4, 3);
  for (int i = 1; i < 6; ++i) E.U.row(i) = E.U.row(0);
  const Candidate c{{0, 4}, 3};
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(global_centroid_score(E, c), score_visualization(E, i, c), 1e-14);
}

TEST(GlobalCentroid, MatchesMeanThenProductOracle) {
  Rng rng(43);
  const EmbeddingSet E = random_embeddings(rng, 9, 7, 5, 4);
  std::vector<double> ug(4, 0.0);
  for (int i = 0; i < 9; ++i)
    for (int k = 0; k < 4; ++k) ug[k] += E.U(i, k) / 9.0;
  auto dot = [&](const Matrix& X, int row) {
    double s = 0;
    for (int k = 0; k < 4; ++k) s += ug[k] * X(row, k);
    return s;
  };
  for (int t = 0; t < 5; ++t) {
    const Candidate c{{t % 7, (t + 3) % 7}, t};
    EXPECT_NEAR(global_centroid_score(E, c), dot(E.Z, t) * dot(E.V, t % 7) * dot(E.V, (t + 3) % 7), 1e-13);
  }
  // user invariance of the lifted scorer
  const auto scorer = per_candidate([&](int, const Candidate& c) { return global_centroid_score(E, c); });
  const std::vector<Candidate> slate{{{0}, 1}, {{2, 5}, 4}};
  EXPECT_EQ(scorer(0, slate), scorer(8, slate));
}

TEST(RandomScore, PureAndInUnitInterval) {
  const Candidate c{{1, 2}, 3};
  EXPECT_EQ(random_score(5, 1, c), random_score(5, 1, c));
  EXPECT_NE(random_score(5, 1, c), random_score(6, 1, c));
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const Candidate r{{static_cast<int>(rng.below(50))}, static_cast<int>(rng.below(50))};
    const double s = random_score(9, static_cast<int>(rng.below(100)), r);
    EXPECT_GE(s, 0.0);
    EXPECT_LT(s, 1.0);
  }
}

}  // namespace
}  // namespace pvis
