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

// Sparse preference graphs: user-by-attribute (A), user-by-configuration (C)
// and attribute-by-configuration (D) multiplicity matrices.

#include <algorithm>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "pvis/common.hpp"
#include "pvis/corpus.hpp"

namespace pvis {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// Immutable sparse matrix kept simultaneously as a sorted coordinate list and
// in compressed row and compressed column form.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols) { build({}); }

  // Duplicate coordinates are summed. Every resulting weight must be > 0.
  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
    if (rows < 0 || cols < 0) throw ArgumentError("negative sparse matrix shape");
    for (const auto& t : triplets) {
      if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
        throw ArgumentError("triplet (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                            ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    std::sort(triplets.begin(), triplets.end(),
              [](const Triplet& a, const Triplet& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
    std::vector<Triplet> merged;
    for (const auto& t : triplets) {
      if (!merged.empty() && merged.back().row == t.row && merged.back().col == t.col) {
        merged.back().value += t.value;
      } else {
        merged.push_back(t);
      }
    }
    for (const auto& t : merged)
      if (!(t.value > 0.0)) throw ValidationError("sparse weights must be positive");
    SparseMatrix s;
    s.rows_ = rows;
    s.cols_ = cols;
    s.build(std::move(merged));
    return s;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return coo_.size(); }
  const std::vector<Triplet>& entries() const { return coo_; }

  double density() const {
    const double cells = static_cast<double>(rows_) * static_cast<double>(cols_);
    return cells > 0 ? static_cast<double>(nnz()) / cells : 0.0;
  }
  double sum() const {
    double s = 0.0;
    for (const auto& t : coo_) s += t.value;
    return s;
  }
  double squared_norm() const {
    double s = 0.0;
    for (const auto& t : coo_) s += t.value * t.value;
    return s;
  }

  double at(int i, int j) const {
    const auto begin = col_idx_.begin() + row_ptr_[i], end = col_idx_.begin() + row_ptr_[i + 1];
    const auto it = std::lower_bound(begin, end, j);
    return it != end && *it == j ? row_val_[it - col_idx_.begin()] : 0.0;
  }

  // Visit the nonzeros of row i (ascending column) or column j (ascending row).
  template <typename F>
  void for_row(int i, F&& f) const {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) f(col_idx_[k], row_val_[k]);
  }
  template <typename F>
  void for_col(int j, F&& f) const {
    for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) f(row_idx_[k], col_val_[k]);
  }
  int row_nnz(int i) const { return row_ptr_[i + 1] - row_ptr_[i]; }
  int col_nnz(int j) const { return col_ptr_[j + 1] - col_ptr_[j]; }

  // this * X (rows x d)
  Matrix multiply(const Matrix& X) const {
    if (X.rows() != cols_) throw ArgumentError("sparse product shape mismatch");
    Matrix out = Matrix::Zero(rows_, X.cols());
    for (int i = 0; i < rows_; ++i)
      for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) out.row(i) += row_val_[k] * X.row(col_idx_[k]);
    return out;
  }
  // this^T * X (cols x d)
  Matrix transpose_multiply(const Matrix& X) const {
    if (X.rows() != rows_) throw ArgumentError("sparse product shape mismatch");
    Matrix out = Matrix::Zero(cols_, X.cols());
    for (int j = 0; j < cols_; ++j)
      for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) out.row(j) += col_val_[k] * X.row(row_idx_[k]);
    return out;
  }

  Matrix to_dense() const {
    Matrix d = Matrix::Zero(rows_, cols_);
    for (const auto& t : coo_) d(t.row, t.col) = t.value;
    return d;
  }

  SparseMatrix binarized() const {
    auto t = coo_;
    for (auto& e : t) e.value = 1.0;
    return from_triplets(rows_, cols_, std::move(t));
  }

  bool operator==(const SparseMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_ || coo_.size() != o.coo_.size()) return false;
    for (std::size_t k = 0; k < coo_.size(); ++k)
      if (coo_[k].row != o.coo_[k].row || coo_[k].col != o.coo_[k].col || coo_[k].value != o.coo_[k].value)
        return false;
    return true;
  }

 private:
  void build(std::vector<Triplet> sorted) {
    coo_ = std::move(sorted);
    row_ptr_.assign(rows_ + 1, 0);
    col_ptr_.assign(cols_ + 1, 0);
    for (const auto& t : coo_) {
      ++row_ptr_[t.row + 1];
      ++col_ptr_[t.col + 1];
    }
    for (int i = 0; i < rows_; ++i) row_ptr_[i + 1] += row_ptr_[i];
    for (int j = 0; j < cols_; ++j) col_ptr_[j + 1] += col_ptr_[j];
    col_idx_.resize(coo_.size());
    row_val_.resize(coo_.size());
    row_idx_.resize(coo_.size());
    col_val_.resize(coo_.size());
    std::vector<int> next = col_ptr_;
    for (std::size_t k = 0; k < coo_.size(); ++k) {
      col_idx_[k] = coo_[k].col;
      row_val_[k] = coo_[k].value;
      const int at = next[coo_[k].col]++;
      row_idx_[at] = coo_[k].row;
      col_val_[at] = coo_[k].value;
    }
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<Triplet> coo_;
  std::vector<int> row_ptr_, col_idx_;
  std::vector<double> row_val_;
  std::vector<int> col_ptr_, row_idx_;
  std::vector<double> col_val_;
};

struct InteractionGraphs {
  SparseMatrix A;  // users x attributes
  SparseMatrix C;  // users x configurations
  SparseMatrix D;  // attributes x configurations

  int num_users() const { return A.rows(); }
  int num_attributes() const { return A.cols(); }
  int num_configs() const { return C.cols(); }
  bool operator==(const InteractionGraphs&) const = default;
};

struct GraphShape {
  int users = 0;
  int attributes = 0;
  int configs = 0;

  static GraphShape of(const Corpus& corpus) {
    return {corpus.num_users, static_cast<int>(corpus.num_attributes()), static_cast<int>(corpus.num_configs())};
  }
};

inline SparseMatrix build_user_attribute(GraphShape shape, std::span<const VisualizationSpec> vis) {
  std::vector<Triplet> t;
  for (const auto& v : vis)
    for (int a : v.attribute_ids) t.push_back({v.user_id, a, 1.0});
  return SparseMatrix::from_triplets(shape.users, shape.attributes, std::move(t));
}

inline SparseMatrix build_user_config(GraphShape shape, std::span<const VisualizationSpec> vis) {
  std::vector<Triplet> t;
  for (const auto& v : vis) t.push_back({v.user_id, v.config_id, 1.0});
  return SparseMatrix::from_triplets(shape.users, shape.configs, std::move(t));
}

inline SparseMatrix build_attribute_config(GraphShape shape, std::span<const VisualizationSpec> vis) {
  std::vector<Triplet> t;
  for (const auto& v : vis)
    for (int a : v.attribute_ids) t.push_back({a, v.config_id, 1.0});
  return SparseMatrix::from_triplets(shape.attributes, shape.configs, std::move(t));
}

inline InteractionGraphs build_graphs(GraphShape shape, std::span<const VisualizationSpec> vis,
                                      bool binarize = false) {
  InteractionGraphs g{build_user_attribute(shape, vis), build_user_config(shape, vis),
                      build_attribute_config(shape, vis)};
  if (binarize) g = {g.A.binarized(), g.C.binarized(), g.D.binarized()};
  return g;
}

inline InteractionGraphs build_graphs(const Corpus& corpus, bool binarize = false) {
  return build_graphs(GraphShape::of(corpus), corpus.visualizations, binarize);
}

inline SparseMatrix build_user_attribute(const Corpus& c) { return build_user_attribute(GraphShape::of(c), c.visualizations); }
inline SparseMatrix build_user_config(const Corpus& c) { return build_user_config(GraphShape::of(c), c.visualizations); }
inline SparseMatrix build_attribute_config(const Corpus& c) {
  return build_attribute_config(GraphShape::of(c), c.visualizations);
}

struct GraphStats {
  int users = 0, attributes = 0, configs = 0;
  double visualizations = 0;  // total feedback events, sum(C)
  double density_a = 0, density_c = 0, density_d = 0;
};

inline GraphStats graph_stats(const InteractionGraphs& g) {
  return {g.num_users(), g.num_attributes(), g.num_configs(), g.C.sum(),
          g.A.density(),  g.C.density(),      g.D.density()};
}

// Binary container: "PVGR", version, then A, C, D as (rows, cols, nnz, triplets).
namespace graphs_detail {

inline void write_sparse(std::ostream& out, const SparseMatrix& s) {
  binio::write_u64(out, static_cast<std::uint64_t>(s.rows()));
  binio::write_u64(out, static_cast<std::uint64_t>(s.cols()));
  binio::write_u64(out, s.nnz());
  for (const auto& t : s.entries()) {
    binio::write_u64(out, static_cast<std::uint64_t>(t.row));
    binio::write_u64(out, static_cast<std::uint64_t>(t.col));
    binio::write_f64(out, t.value);
  }
}

inline SparseMatrix read_sparse(std::istream& in) {
  const auto rows = binio::read_u64(in), cols = binio::read_u64(in), nnz = binio::read_u64(in);
  if (rows > (1u << 30) || cols > (1u << 30) || nnz > (1ULL << 34)) throw ParseError("corrupt sparse matrix header");
  std::vector<Triplet> t(nnz);
  for (auto& e : t) {
    e.row = static_cast<int>(binio::read_u64(in));
    e.col = static_cast<int>(binio::read_u64(in));
    e.value = binio::read_f64(in);
  }
  return SparseMatrix::from_triplets(static_cast<int>(rows), static_cast<int>(cols), std::move(t));
}

}  // namespace graphs_detail

inline void write_graphs(std::ostream& out, const InteractionGraphs& g) {
  binio::write_header(out, "PVGR", 1);
  graphs_detail::write_sparse(out, g.A);
  graphs_detail::write_sparse(out, g.C);
  graphs_detail::write_sparse(out, g.D);
}

inline InteractionGraphs read_graphs(std::istream& in) {
  binio::read_header(in, "PVGR", 1);
  InteractionGraphs g;
  g.A = graphs_detail::read_sparse(in);
  g.C = graphs_detail::read_sparse(in);
  g.D = graphs_detail::read_sparse(in);
  if (g.A.rows() != g.C.rows() || g.A.cols() != g.D.rows() || g.C.cols() != g.D.cols())
    throw ParseError("graph container has inconsistent shapes");
  return g;
}

inline void save_graphs(const InteractionGraphs& g, const std::string& path) {
  auto out = binio::open_out(path);
  write_graphs(out, g);
  if (!out) throw Error("failed writing '" + path + "'");
}

inline InteractionGraphs load_graphs(const std::string& path) {
  auto in = binio::open_in(path);
  return read_graphs(in);
}

}  // namespace pvis
