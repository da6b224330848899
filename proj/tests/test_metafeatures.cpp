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

#include "oracles.hpp"
#include "pvis/metafeatures.hpp"
#include "pvis/synth.hpp"

namespace pvis {
namespace {

int psi_index(std::string_view name) {
  for (int i = 0; i < kNumPsi; ++i)
    if (kPsiNames[i] == name) return i;
  ADD_FAILURE() << "no feature " << name;
  return 0;
}

double feature(const PsiVector& p, std::string_view name) { return p[psi_index(name)]; }

std::vector<double> random_values(Rng& rng, std::size_t n, bool ties) {
  std::vector<double> v(n);
  for (auto& x : v) x = ties ? static_cast<double>(rng.below(6)) - 2.0 : rng.normal() * 3.0 + 1.0;
  return v;
}

TEST(Representations, Examples) {
  const std::vector<double> x = {1, 1, 2};
  const auto reps = representations_of(x);
  EXPECT_EQ(reps[1], (std::vector<double>{0.25, 0.25, 0.5}));
  EXPECT_EQ(representations_of(std::vector<double>{0, 5, 10})[2], (std::vector<double>{0, 0.5, 1}));
  EXPECT_EQ(representations_of(std::vector<double>{4, 4, 4})[2], (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(representations_of(std::vector<double>{0, 0})[1], (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(representations_of(std::vector<double>{-7, 0, 3})[3], (std::vector<double>{-3, 0, 2}));
}

TEST(Representations, ProbabilitySumsToOne) {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const auto x = random_values(rng, 1 + rng.below(30), t % 2);
    const auto p = representations_of(x)[1];
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(Representations, NominalFrequencyAndTemporalEpoch) {
  AttributeColumn nominal;
  nominal.values = {std::string("a"), std::string("b"), std::string("a"), std::monostate{}};
  nominal.inferred_type = AttributeType::nominal;
  const auto enc = encode_column(nominal);
  EXPECT_EQ(enc[0], 2.0);
  EXPECT_EQ(enc[1], 1.0);
  EXPECT_TRUE(std::isnan(enc[3]));
  AttributeColumn temporal;
  temporal.values = {std::string("1970-01-02")};
  temporal.inferred_type = AttributeType::temporal;
  EXPECT_EQ(encode_column(temporal)[0], 86400.0);
}

std::vector<std::vector<double>> values_of(const std::vector<double>& x,
                                           const std::vector<std::vector<std::size_t>>& cells) {
  std::vector<std::vector<double>> out;
  for (const auto& c : cells) {
    out.emplace_back();
    for (auto i : c) out.back().push_back(x[i]);
  }
  return out;
}

TEST(Partition, Examples) {
  const std::vector<double> x = {1, 2, 3, 4, 5, 6, 7, 8};
  EXPECT_EQ(values_of(x, partition(x, PartitionScheme::quartile, 4)),
            (std::vector<std::vector<double>>{{1, 2}, {3, 4}, {5, 6}, {7, 8}}));
  const auto one = partition(x, PartitionScheme::kmeans, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].size(), 8u);
  const std::vector<double> y = {0, 0, 10};
  EXPECT_EQ(values_of(y, partition(y, PartitionScheme::equal_width, 2)),
            (std::vector<std::vector<double>>{{0, 0}, {10}}));
}

TEST(Partition, KMeansCellsOrderedByCentroid) {
  const std::vector<double> x = {100, 1, 2, 50, 51, 101, 3};
  const auto cells = values_of(x, partition(x, PartitionScheme::kmeans, 3));
  EXPECT_EQ(cells, (std::vector<std::vector<double>>{{1, 2, 3}, {50, 51}, {100, 101}}));
  // Fewer distinct values than clusters leaves trailing cells empty.
  const std::vector<double> z = {5, 5, 9};
  const auto zc = partition(z, PartitionScheme::kmeans, 4);
  EXPECT_EQ(zc[0].size(), 2u);
  EXPECT_EQ(zc[1].size(), 1u);
  EXPECT_TRUE(zc[2].empty() && zc[3].empty());
}

TEST(Partition, CellsAreDisjointAndCover) {
  Rng rng(5);
  for (int t = 0; t < 300; ++t) {
    const auto x = random_values(rng, 1 + rng.below(40), t % 3 == 0);
    for (int s = 0; s < 3; ++s) {
      const int k = 1 + static_cast<int>(rng.below(6));
      const auto cells = partition(x, static_cast<PartitionScheme>(s), k);
      ASSERT_EQ(static_cast<int>(cells.size()), k);
      std::vector<int> seen(x.size(), 0);
      for (const auto& c : cells)
        for (auto i : c) ++seen[i];
      for (int v : seen) EXPECT_EQ(v, 1);
    }
  }
}

TEST(Psi, Examples) {
  const std::vector<double> p = {0.25, 0.25, 0.25, 0.25};
  const auto f = psi(p);
  EXPECT_NEAR(feature(f, "entropy"), std::log(4.0), 1e-12);
  EXPECT_NEAR(feature(f, "norm-entropy"), 1.0, 1e-12);
  const auto g = psi(std::vector<double>{1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(feature(g, "q1"), 1.5);
  EXPECT_DOUBLE_EQ(feature(g, "q3"), 3.5);
  EXPECT_DOUBLE_EQ(feature(g, "iqr"), 2.0);
  EXPECT_DOUBLE_EQ(feature(g, "spearman"), 1.0);
  EXPECT_DOUBLE_EQ(feature(g, "kendall"), 1.0);
  EXPECT_DOUBLE_EQ(feature(g, "pearson"), 1.0);
}

TEST(Psi, CountsAndMissing) {
  const auto f = psi(std::vector<double>{0, 3, 3}, 1);
  EXPECT_EQ(feature(f, "count"), 4);
  EXPECT_EQ(feature(f, "missing"), 1);
  EXPECT_DOUBLE_EQ(feature(f, "frac-missing"), 0.25);
  EXPECT_EQ(feature(f, "nnz"), 2);
  EXPECT_EQ(feature(f, "unique"), 2);
  EXPECT_DOUBLE_EQ(feature(f, "density"), 0.5);
  EXPECT_DOUBLE_EQ(feature(f, "harmonic-mean"), 3.0);
}

TEST(Psi, EmptyAndConstantInputsAreFinite) {
  for (const auto& x : {std::vector<double>{}, std::vector<double>{0}, std::vector<double>{5, 5, 5}}) {
    const auto f = psi(x);
    for (double v : f) EXPECT_TRUE(std::isfinite(v));
  }
  const auto c = psi(std::vector<double>{5, 5, 5});
  EXPECT_EQ(feature(c, "spearman"), 0.0);
  EXPECT_EQ(feature(c, "spearman-p"), 1.0);
  EXPECT_EQ(feature(c, "kmeans-silhouette"), 0.0);
  EXPECT_EQ(feature(c, "hist0"), 1.0);
}

// Statistics checked against direct textbook formulas written independently.
TEST(Psi, MatchesIndependentOracles) {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const auto x = random_values(rng, 5 + rng.below(40), t % 2);
    const auto f = psi(x);
    const auto o = oracle::describe(x);
    const double tol = 1e-9;
    EXPECT_NEAR(feature(f, "mean"), o.mean, tol);
    EXPECT_NEAR(feature(f, "variance"), o.var, tol * (1 + o.var));
    EXPECT_NEAR(feature(f, "skewness"), o.skew, 1e-8);
    EXPECT_NEAR(feature(f, "kurtosis"), o.kurt, 1e-8);
    EXPECT_NEAR(feature(f, "kstat3"), o.k3, 1e-8 * (1 + std::abs(o.k3)));
    EXPECT_NEAR(feature(f, "kstat4"), o.k4, 1e-8 * (1 + std::abs(o.k4)));
    EXPECT_NEAR(feature(f, "kendall"), o.kendall, 1e-12);
    EXPECT_NEAR(feature(f, "spearman"), o.spearman, 1e-12);
    EXPECT_NEAR(feature(f, "gini"), o.gini, 1e-12);
    EXPECT_NEAR(feature(f, "median-abs-dev"), o.mad, 1e-12);
    const KMeans1D km = kmeans_1d(x, kLandmarkClusters);
    EXPECT_NEAR(feature(f, "kmeans-silhouette"), oracle::silhouette(x, km.assignment, kLandmarkClusters), 1e-12);
  }
}

TEST(Psi, HistogramIsADistribution) {
  Rng rng(13);
  for (int t = 0; t < 100; ++t) {
    const auto f = psi(random_values(rng, 1 + rng.below(50), t % 2));
    double s = 0;
    for (int b = 0; b < kHistogramBins; ++b) s += f[psi_index("hist0") + b];
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(KMeans, Converges) {
  const std::vector<double> x = {1, 10, 20, 30, 2, 11, 21, 31};
  const auto km = kmeans_1d(x, 4);
  EXPECT_EQ(km.assignment, (std::vector<int>{0, 1, 2, 3, 0, 1, 2, 3}));
  // Seeds are the first distinct values in input order, so a different order
  // can settle in a different local optimum.
  const std::vector<double> y = {1, 2, 10, 11, 20, 21, 30, 31};
  EXPECT_EQ(kmeans_1d(y, 4).assignment, (std::vector<int>{0, 1, 2, 2, 3, 3, 3, 3}));
  EXPECT_GE(km.iterations, 2);
  EXPECT_LE(km.iterations, kKMeansMaxIterations);
}

// --- meta-feature vectors -----------------------------------------------------

TEST(MetaFeatureVector, CatalogIsStable) {
  EXPECT_EQ(kNumMetaFeatures, 3976);
  EXPECT_EQ(meta_feature_catalog().size(), static_cast<std::size_t>(kNumMetaFeatures));
  EXPECT_EQ(meta_feature_catalog().front(), "identity/all/count");
  EXPECT_EQ(meta_feature_catalog().back(), "logbin/kmeans[3]/kmeans-iterations");
  // Frozen: any change to the catalog changes artifact compatibility.
  EXPECT_EQ(hex64(meta_feature_layout_hash()), "3c6d97dbbf7df1b9");
}

TEST(MetaFeatureVector, FixedLengthAndFiniteOverFuzzedColumns) {
  Rng rng(17);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> x(1 + rng.below(60));
    for (auto& v : x) {
      const auto r = rng.below(10);
      v = r == 0 ? std::numeric_limits<double>::quiet_NaN() : r < 3 ? static_cast<double>(rng.below(3))
                                                                     : rng.normal() * std::pow(10.0, rng.below(8));
    }
    if (std::all_of(x.begin(), x.end(), [](double v) { return std::isnan(v); })) x[0] = 1.0;
    const Vector m = meta_feature_vector_of(x);
    ASSERT_EQ(m.size(), kNumMetaFeatures);
    ASSERT_TRUE(m.allFinite()) << "trial " << t;
  }
}

TEST(MetaFeatureVector, IdenticalColumnsHaveCosineOne) {
  const Corpus c = generate_synthetic_corpus(4, 5, 4, 6, 2);
  AttributeColumn a = c.datasets[0].columns[0];
  AttributeColumn b = a;
  b.dataset_id = 99;
  b.attribute_id = 123;
  const Vector va = meta_feature_vector(a), vb = meta_feature_vector(b);
  EXPECT_EQ(va, vb);
  EXPECT_NEAR(va.dot(vb) / (va.norm() * vb.norm()), 1.0, 1e-12);
}

TEST(MetaFeatureVector, MinMaxBlockInvariantToAffineMaps) {
  Rng rng(19);
  const Eigen::Index block = kBlocksPerRepresentation * kNumPsi;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(3 + rng.below(40)), y(x.size());
    for (auto& v : x) v = rng.normal();
    const double a = 0.5 + 4.0 * rng.uniform(), b = rng.normal() * 10.0;
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
    const Vector mx = meta_feature_vector_of(x), my = meta_feature_vector_of(y);
    const auto bx = mx.segment(2 * block, block), by = my.segment(2 * block, block);
    EXPECT_LE((bx - by).cwiseAbs().maxCoeff(), 1e-6 * (1.0 + bx.cwiseAbs().maxCoeff())) << t;
    EXPECT_GT((mx.head(block) - my.head(block)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(MetaFeatureMatrix, UnitColumnsAndDense) {
  const Corpus c = generate_synthetic_corpus(6, 10, 8, 6, 3);
  const auto mf = build_meta_feature_matrix(c);
  ASSERT_EQ(mf.M.rows(), kNumMetaFeatures);
  ASSERT_EQ(mf.M.cols(), static_cast<Eigen::Index>(c.num_attributes()));
  for (Eigen::Index j = 0; j < mf.M.cols(); ++j) EXPECT_NEAR(mf.M.col(j).norm(), 1.0, 1e-9);
  const double density = static_cast<double>((mf.M.array() != 0.0).count()) / static_cast<double>(mf.M.size());
  EXPECT_GT(density, 0.25);
  // column j is the normalized vector of attribute j
  const Vector v = meta_feature_vector(c.attribute(5));
  EXPECT_LE((mf.M.col(5) - v / v.norm()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MetaFeatureMatrix, SaveLoadRoundTrip) {
  const Corpus c = generate_synthetic_corpus(6, 4, 3, 4, 2);
  const auto mf = build_meta_feature_matrix(c);
  const auto path = (std::filesystem::temp_directory_path() / "pvis_m.bin").string();
  save_meta_feature_matrix(mf, path);
  const auto back = load_meta_feature_matrix(path);
  EXPECT_EQ(back.M, mf.M);
  EXPECT_EQ(back.layout_hash, meta_feature_layout_hash());
  EXPECT_THROW(load_meta_embedding(path), ParseError);
  std::filesystem::remove(path);
}

// --- meta-embedding -------------------------------------------------------------

Matrix random_matrix(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

TEST(MetaEmbedding, FullRankReconstructs) {
  Rng rng(23);
  const Matrix M = random_matrix(rng, 12, 7);
  const auto me = fit_meta_embedding(M, 7);
  EXPECT_LE((M - me.reconstruction()).norm(), 1e-8);
  EXPECT_LE((me.H.transpose() * me.H - Matrix::Identity(7, 7)).norm(), 1e-10);
  EXPECT_LE((me.Q.transpose() * me.Q - Matrix::Identity(7, 7)).norm(), 1e-10);
  for (int i = 1; i < me.rank(); ++i) EXPECT_GE(me.sigma[i - 1], me.sigma[i]);
}

TEST(MetaEmbedding, RankOneOuterProduct) {
  Rng rng(29);
  const Matrix M = random_matrix(rng, 9, 1) * random_matrix(rng, 1, 6);
  EXPECT_LE((M - fit_meta_embedding(M, 1).reconstruction()).norm(), 1e-8);
}

TEST(MetaEmbedding, RankOutOfRangeIsArgumentError) {
  const Matrix M = Matrix::Ones(4, 3);
  EXPECT_THROW(fit_meta_embedding(M, 0), ArgumentError);
  EXPECT_THROW(fit_meta_embedding(M, 4), ArgumentError);
}

TEST(MetaEmbedding, ErrorMatchesEigendecompositionOracle) {
  Rng rng(31);
  const Matrix M = random_matrix(rng, 20, 30);
  const double expected = oracle::best_rank_error(M, 5);
  EXPECT_NEAR((M - fit_meta_embedding(M, 5).reconstruction()).norm(), expected, 1e-6);
}

TEST(MetaEmbedding, ErrorNonIncreasingInRank) {
  Rng rng(37);
  const Matrix M = random_matrix(rng, 15, 10);
  double prev = std::numeric_limits<double>::infinity();
  for (int r = 1; r <= 10; ++r) {
    const double e = (M - fit_meta_embedding(M, r).reconstruction()).norm();
    EXPECT_LE(e, prev + 1e-12);
    prev = e;
  }
}

TEST(MetaEmbedding, EmbeddingRoundTripAndProjection) {
  Rng rng(41);
  Matrix M = random_matrix(rng, 30, 8);
  normalize_columns(M);
  const auto exact = fit_meta_embedding(M, 8);
  for (int j = 0; j < 8; ++j)
    EXPECT_LE((embed_new_attribute(exact, M.col(j)) - exact.Q.row(j).transpose()).norm(), 1e-8);

  const auto me = fit_meta_embedding(M, 3);
  Vector m_hat = random_matrix(rng, 30, 1);
  m_hat /= m_hat.norm();
  const Vector q = embed_new_attribute(me, m_hat);
  EXPECT_LE((me.H * me.sigma.asDiagonal() * q - me.H * me.H.transpose() * m_hat).norm(), 1e-8);
  const Vector orth = m_hat - me.H * (me.H.transpose() * m_hat);
  EXPECT_LE(embed_new_attribute(me, orth / orth.norm()).norm(), 1e-8);
  EXPECT_THROW(embed_new_attribute(me, Vector::Ones(5)), ArgumentError);
}

TEST(MetaEmbedding, RankDeficientEmbeddingRejected) {
  const Matrix M = Matrix::Ones(6, 4);
  const auto me = fit_meta_embedding(M, 2);
  EXPECT_THROW(embed_new_attribute(me, M.col(0) / M.col(0).norm()), NumericalError);
}

TEST(MetaEmbedding, SaveLoadRoundTrip) {
  Rng rng(43);
  const auto me = fit_meta_embedding(random_matrix(rng, 10, 6), 3);
  const auto path = (std::filesystem::temp_directory_path() / "pvis_me.bin").string();
  save_meta_embedding(me, 77, path);
  std::uint64_t hash = 0;
  const auto back = load_meta_embedding(path, &hash);
  EXPECT_EQ(hash, 77u);
  EXPECT_EQ(back.H, me.H);
  EXPECT_EQ(back.sigma, me.sigma);
  EXPECT_EQ(back.Q, me.Q);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace pvis
