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

// Dataset-independent attribute meta-features. Every column, whatever its
// length or origin, maps to the same K-dimensional vector: a fixed battery of
// statistics applied to several representations of the column and to the cells
// of several partitions of each representation.

#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "pvis/common.hpp"
#include "pvis/corpus.hpp"

namespace pvis {

// ---------------------------------------------------------------------------
// Catalog.

inline constexpr std::array<std::string_view, 4> kRepresentationNames = {"identity", "probability",
                                                                         "minmax", "logbin"};
inline constexpr int kNumRepresentations = 4;

enum class PartitionScheme { quartile, equal_width, kmeans };
inline constexpr std::array<std::string_view, 3> kPartitionSchemeNames = {"quartile", "equal-width",
                                                                          "kmeans"};
// Cells per scheme; together with the representations these fix K.
inline constexpr std::array<int, 3> kPartitionCells = {4, 5, 4};

inline constexpr int kHistogramBins = 10;
inline constexpr int kLandmarkClusters = 4;
inline constexpr int kKMeansMaxIterations = 50;

inline constexpr std::array<std::string_view, 71> kPsiNames = {
    "count", "missing", "frac-missing", "nnz", "unique", "density",
    "q1", "q3", "iqr",
    "iqr1.5-lb", "iqr1.5-ub", "iqr1.5-total", "iqr3-lb", "iqr3-ub", "iqr3-total",
    "std2-lb", "std2-ub", "std2-total", "std3-lb", "std3-ub", "std3-total",
    "spearman", "spearman-p", "kendall", "kendall-p", "pearson", "pearson-p",
    "min", "max", "range", "median", "geometric-mean", "harmonic-mean",
    "mean", "std", "variance", "skewness", "kurtosis", "hyperskewness",
    "moment6", "moment7", "moment8", "moment9", "moment10", "kstat3", "kstat4",
    "quartile-dispersion", "median-abs-dev", "avg-abs-dev", "coeff-variation",
    "efficiency-ratio", "variance-to-mean",
    "snr", "entropy", "norm-entropy", "gini",
    "quartile-max-gap", "centroid-max-gap",
    "hist0", "hist1", "hist2", "hist3", "hist4", "hist5", "hist6", "hist7", "hist8", "hist9",
    "kmeans-ssd", "kmeans-silhouette", "kmeans-iterations"};
inline constexpr int kNumPsi = static_cast<int>(kPsiNames.size());

inline constexpr int kBlocksPerRepresentation = 1 + 4 + 5 + 4;
inline constexpr int kNumMetaFeatures = kNumRepresentations * kBlocksPerRepresentation * kNumPsi;

// Names of all K entries in layout order: "<representation>/<block>/<feature>"
// where block is "all" or "<scheme>[<cell>]".
inline const std::vector<std::string>& meta_feature_catalog() {
  static const std::vector<std::string> catalog = [] {
    std::vector<std::string> out;
    out.reserve(kNumMetaFeatures);
    for (auto rep : kRepresentationNames) {
      std::vector<std::string> blocks = {"all"};
      for (std::size_t s = 0; s < kPartitionSchemeNames.size(); ++s)
        for (int c = 0; c < kPartitionCells[s]; ++c)
          blocks.push_back(std::string(kPartitionSchemeNames[s]) + "[" + std::to_string(c) + "]");
      for (const auto& block : blocks)
        for (auto f : kPsiNames) out.push_back(std::string(rep) + "/" + block + "/" + std::string(f));
    }
    return out;
  }();
  return catalog;
}

inline std::uint64_t meta_feature_layout_hash() {
  Fnv1a h;
  for (const auto& name : meta_feature_catalog()) h.update(name).update("\n");
  return h.digest();
}

// ---------------------------------------------------------------------------
// Order statistics.

namespace mf_detail {

inline double median_sorted(std::span<const double> s) {
  if (s.empty()) return 0.0;
  const std::size_t n = s.size();
  return n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

// Q1/Q3 as medians of the floor(n/2) smallest and largest values.
inline std::pair<double, double> hinges_sorted(std::span<const double> s) {
  if (s.empty()) return {0.0, 0.0};
  if (s.size() == 1) return {s[0], s[0]};
  const std::size_t half = s.size() / 2;
  return {median_sorted(s.first(half)), median_sorted(s.last(half))};
}

// Linear interpolation between order statistics, q in [0, 1].
inline double quantile_sorted(std::span<const double> s, double q) {
  if (s.empty()) return 0.0;
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

inline std::vector<double> sorted_copy(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  return s;
}

// Average ranks (1-based), ties share their mean rank.
inline std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline double two_sided_normal_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

// Fisher-z approximation; `scale` corrects the variance for Spearman.
inline double correlation_p(double r, std::size_t n, double scale = 1.0) {
  if (n <= 3 || r == 0.0) return 1.0;
  if (std::abs(r) >= 1.0) return 0.0;
  return two_sided_normal_p(std::atanh(r) * std::sqrt((static_cast<double>(n) - 3.0) / scale));
}

inline std::uint64_t tie_pairs(const std::vector<double>& v) {
  // v sorted
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const std::uint64_t c = j - i;
    t += c * (c - 1) / 2;
    i = j;
  }
  return t;
}

// Kendall tau-b in O(n log n) (Knight's algorithm).
inline double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  std::vector<std::pair<double, double>> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = {x[i], y[i]};
  std::sort(p.begin(), p.end());
  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  std::uint64_t n1 = 0, n3 = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && p[j].first == p[i].first) ++j;
    n1 += static_cast<std::uint64_t>(j - i) * (j - i - 1) / 2;
    for (std::size_t a = i; a < j;) {
      std::size_t b = a;
      while (b < j && p[b].second == p[a].second) ++b;
      n3 += static_cast<std::uint64_t>(b - a) * (b - a - 1) / 2;
      a = b;
    }
    i = j;
  }
  std::vector<double> ys(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = p[i].second;
  std::uint64_t swaps = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n), hi = std::min(lo + 2 * width, n);
      std::size_t a = lo, b = mid, k = lo;
      while (a < mid && b < hi) {
        if (ys[b] < ys[a]) {
          swaps += mid - a;
          buf[k++] = ys[b++];
        } else {
          buf[k++] = ys[a++];
        }
      }
      while (a < mid) buf[k++] = ys[a++];
      while (b < hi) buf[k++] = ys[b++];
    }
    ys.swap(buf);
  }
  const std::uint64_t n2 = tie_pairs(ys);
  const double denom = std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
  if (denom <= 0) return 0.0;
  const double concordant_minus_discordant =
      static_cast<double>(n0) - static_cast<double>(n1) - static_cast<double>(n2) + static_cast<double>(n3) -
      2.0 * static_cast<double>(swaps);
  return std::clamp(concordant_minus_discordant / denom, -1.0, 1.0);
}

inline double kendall_p(double tau, std::size_t n) {
  if (n < 2 || tau == 0.0) return 1.0;
  const double dn = static_cast<double>(n);
  return two_sided_normal_p(3.0 * tau * std::sqrt(dn * (dn - 1.0)) / std::sqrt(2.0 * (2.0 * dn + 5.0)));
}

// Sum over y in the sorted set of |x - y|, with prefix sums of the set.
inline double abs_dev_sum(double x, const std::vector<double>& sorted, const std::vector<double>& prefix) {
  const auto below = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
  const double left = x * static_cast<double>(below) - prefix[below];
  const double right = (prefix.back() - prefix[below]) - x * static_cast<double>(sorted.size() - below);
  return left + right;
}

}  // namespace mf_detail

// ---------------------------------------------------------------------------
// One-dimensional k-means with deterministic initialization on the first k
// distinct values (in input order). Clusters may end up empty.

struct KMeans1D {
  std::vector<int> assignment;      // per value, cluster index in [0, k)
  std::vector<double> centroids;    // size k; empty clusters keep their last centroid
  std::vector<std::size_t> sizes;   // size k
  int iterations = 0;
  int initialized = 0;              // clusters that received a seed value
};

inline KMeans1D kmeans_1d(std::span<const double> x, int k, int max_iterations = kKMeansMaxIterations) {
  if (k < 1) throw ArgumentError("kmeans: k must be >= 1");
  KMeans1D r;
  r.assignment.assign(x.size(), 0);
  r.centroids.assign(k, 0.0);
  r.sizes.assign(k, 0);
  std::vector<double> seeds;
  for (double v : x) {
    if (static_cast<int>(seeds.size()) == k) break;
    if (std::find(seeds.begin(), seeds.end(), v) == seeds.end()) seeds.push_back(v);
  }
  r.initialized = static_cast<int>(seeds.size());
  if (x.empty()) return r;
  std::copy(seeds.begin(), seeds.end(), r.centroids.begin());
  std::vector<int> prev(x.size(), -1);
  for (int it = 1; it <= max_iterations; ++it) {
    r.iterations = it;
    for (std::size_t i = 0; i < x.size(); ++i) {
      int best = 0;
      double best_d = std::abs(x[i] - r.centroids[0]);
      for (int c = 1; c < r.initialized; ++c) {
        const double d = std::abs(x[i] - r.centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      r.assignment[i] = best;
    }
    std::vector<double> sum(k, 0.0);
    std::fill(r.sizes.begin(), r.sizes.end(), 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      sum[r.assignment[i]] += x[i];
      ++r.sizes[r.assignment[i]];
    }
    for (int c = 0; c < k; ++c)
      if (r.sizes[c]) r.centroids[c] = sum[c] / static_cast<double>(r.sizes[c]);
    if (r.assignment == prev) break;
    prev = r.assignment;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Representations and partitions.

// Numeric view of a column: NaN marks missing cells. Nominal columns are
// frequency-encoded, temporal columns become epoch seconds.
inline std::vector<double> encode_column(const AttributeColumn& column) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> out(column.values.size(), nan);
  if (column.inferred_type == AttributeType::nominal) {
    std::map<std::string, double> freq;
    auto key = [](const Cell& c) {
      if (const auto* s = std::get_if<std::string>(&c)) return "s:" + *s;
      std::ostringstream os;
      os.precision(17);
      os << std::get<double>(c);
      return "d:" + os.str();
    };
    for (const Cell& c : column.values)
      if (!detail::is_missing(c)) freq[key(c)] += 1.0;
    for (std::size_t i = 0; i < column.values.size(); ++i)
      if (!detail::is_missing(column.values[i])) out[i] = freq[key(column.values[i])];
    return out;
  }
  for (std::size_t i = 0; i < column.values.size(); ++i) {
    const Cell& c = column.values[i];
    std::optional<double> v;
    if (column.inferred_type == AttributeType::temporal) {
      if (const auto* s = std::get_if<std::string>(&c)) v = detail::parse_iso8601(*s);
      if (!v) v = detail::numeric_value(c);
    } else {
      v = detail::numeric_value(c);
    }
    if (v && std::isfinite(*v)) out[i] = *v;
  }
  return out;
}

// The four representations of the non-missing values of x: identity,
// probability distribution, min-max scaling and signed log2 binning.
inline std::array<std::vector<double>, kNumRepresentations> representations_of(std::span<const double> x) {
  std::array<std::vector<double>, kNumRepresentations> reps;
  auto& id = reps[0];
  for (double v : x)
    if (!std::isnan(v)) id.push_back(v);
  const std::size_t n = id.size();
  double abs_sum = 0.0;
  for (double v : id) abs_sum += std::abs(v);
  reps[1].resize(n);
  for (std::size_t i = 0; i < n; ++i)
    reps[1][i] = abs_sum > 0 ? std::abs(id[i]) / abs_sum : 1.0 / static_cast<double>(n);
  reps[2].assign(n, 0.0);
  if (n) {
    const auto [lo, hi] = std::minmax_element(id.begin(), id.end());
    if (*hi > *lo)
      for (std::size_t i = 0; i < n; ++i) reps[2][i] = (id[i] - *lo) / (*hi - *lo);
  }
  reps[3].resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = id[i];
    reps[3][i] = (v > 0 ? 1.0 : v < 0 ? -1.0 : 0.0) * std::floor(std::log2(1.0 + std::abs(v)));
  }
  return reps;
}

inline std::array<std::vector<double>, kNumRepresentations> representations(const AttributeColumn& column) {
  return representations_of(encode_column(column));
}

// Splits indices of x into k disjoint cells covering all indices. Quartile
// cells (k=4) cut at the hinges and the median, other k at interpolated
// quantiles; equal-width cells span [min, max]; k-means cells are ordered by
// centroid. Cells may be empty.
inline std::vector<std::vector<std::size_t>> partition(std::span<const double> x, PartitionScheme scheme, int k) {
  if (k < 1) throw ArgumentError("partition: k must be >= 1");
  std::vector<std::vector<std::size_t>> cells(k);
  if (x.empty()) return cells;
  if (k == 1) {
    cells[0].resize(x.size());
    std::iota(cells[0].begin(), cells[0].end(), 0);
    return cells;
  }
  switch (scheme) {
    case PartitionScheme::quartile: {
      const auto s = mf_detail::sorted_copy(x);
      std::vector<double> cuts;
      if (k == 4) {
        const auto [q1, q3] = mf_detail::hinges_sorted(s);
        cuts = {q1, mf_detail::median_sorted(s), q3};
      } else {
        for (int j = 1; j < k; ++j) cuts.push_back(mf_detail::quantile_sorted(s, static_cast<double>(j) / k));
      }
      for (std::size_t i = 0; i < x.size(); ++i) {
        int c = 0;
        while (c < k - 1 && x[i] > cuts[c]) ++c;
        cells[c].push_back(i);
      }
      break;
    }
    case PartitionScheme::equal_width: {
      const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
      const double w = (*hi - *lo) / k;
      for (std::size_t i = 0; i < x.size(); ++i) {
        int c = 0;
        if (w > 0) c = std::min(static_cast<int>(std::floor((x[i] - *lo) / w)), k - 1);
        cells[c].push_back(i);
      }
      break;
    }
    case PartitionScheme::kmeans: {
      const KMeans1D km = kmeans_1d(x, k);
      std::vector<int> order(k);
      std::iota(order.begin(), order.end(), 0);
      // Non-empty clusters by centroid, empty ones last.
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if ((km.sizes[a] == 0) != (km.sizes[b] == 0)) return km.sizes[b] == 0;
        return km.centroids[a] < km.centroids[b];
      });
      std::vector<int> rank(k);
      for (int r = 0; r < k; ++r) rank[order[r]] = r;
      for (std::size_t i = 0; i < x.size(); ++i) cells[rank[km.assignment[i]]].push_back(i);
      break;
    }
  }
  return cells;
}

// ---------------------------------------------------------------------------
// Statistical feature battery.

using PsiVector = std::array<double, kNumPsi>;

// psi over the (non-missing) values x; `missing` counts cells dropped before
// the call. Undefined statistics are imputed so the function is total:
// geometric mean uses |x| with zeros at epsilon, harmonic mean skips zeros,
// degenerate ratios and correlations are 0 (p-value 1), and the silhouette is
// 0 when a cluster is empty.
inline PsiVector psi(std::span<const double> x, std::size_t missing = 0) {
  using namespace mf_detail;
  PsiVector f{};
  const std::size_t n = x.size();
  const double total = static_cast<double>(n + missing);
  int k = 0;
  auto put = [&](double v) { f[k++] = std::isfinite(v) ? v : 0.0; };

  put(total);
  put(static_cast<double>(missing));
  put(total > 0 ? static_cast<double>(missing) / total : 0.0);
  if (n == 0) return f;  // remaining statistics are defined as 0 on an empty cell

  const auto s = sorted_copy(x);
  const double dn = static_cast<double>(n);
  std::size_t nnz = 0;
  for (double v : x) nnz += v != 0.0;
  std::size_t unique = 0;
  for (std::size_t i = 0; i < n; ++i) unique += i == 0 || s[i] != s[i - 1];
  put(static_cast<double>(nnz));
  put(static_cast<double>(unique));
  put(static_cast<double>(nnz) / total);

  const auto [q1, q3] = hinges_sorted(s);
  const double iqr = q3 - q1;
  put(q1);
  put(q3);
  put(iqr);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= dn;
  std::array<double, 11> m{};  // central moments m[2..10]
  for (double v : x) {
    const double d = v - mean;
    double p = d * d;
    for (int j = 2; j <= 10; ++j) {
      m[j] += p;
      p *= d;
    }
  }
  for (int j = 2; j <= 10; ++j) m[j] /= dn;
  const double var = m[2];
  const double sd = std::sqrt(var);
  auto outliers = [&](double lb, double ub) {
    double lo = 0, hi = 0;
    for (double v : x) {
      lo += v < lb;
      hi += v > ub;
    }
    put(lo);
    put(hi);
    put(lo + hi);
  };
  for (double a : {1.5, 3.0}) outliers(q1 - a * iqr, q3 + a * iqr);
  for (double a : {2.0, 3.0}) outliers(mean - a * sd, mean + a * sd);

  const double rho = pearson(average_ranks(x), average_ranks(s));
  put(rho);
  put(correlation_p(rho, n, 1.06));
  const double tau = kendall_tau_b(x, s);
  put(tau);
  put(kendall_p(tau, n));
  const double r = pearson(x, s);
  put(r);
  put(correlation_p(r, n));

  const double mn = s.front(), mx = s.back(), med = median_sorted(s);
  put(mn);
  put(mx);
  put(mx - mn);
  put(med);
  double log_sum = 0.0, inv_sum = 0.0;
  std::size_t inv_n = 0;
  for (double v : x) {
    log_sum += std::log(std::max(std::abs(v), std::numeric_limits<double>::epsilon()));
    if (v != 0.0) {
      inv_sum += 1.0 / v;
      ++inv_n;
    }
  }
  put(std::exp(log_sum / dn));
  put(inv_n && inv_sum != 0.0 ? static_cast<double>(inv_n) / inv_sum : 0.0);
  put(mean);
  put(sd);
  put(var);
  for (int j = 3; j <= 10; ++j) put(sd > 0 ? m[j] / std::pow(sd, j) : 0.0);
  put(n > 2 ? dn * dn / ((dn - 1) * (dn - 2)) * m[3] : 0.0);
  put(n > 3 ? dn * dn * ((dn + 1) * m[4] - 3 * (dn - 1) * m[2] * m[2]) / ((dn - 1) * (dn - 2) * (dn - 3)) : 0.0);

  put(q3 + q1 != 0.0 ? (q3 - q1) / (q3 + q1) : 0.0);
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = std::abs(s[i] - med);
  std::sort(dev.begin(), dev.end());
  put(median_sorted(dev));
  double aad = 0.0;
  for (double v : x) aad += std::abs(v - mean);
  put(aad / dn);
  put(mean != 0.0 ? sd / mean : 0.0);
  put(mean != 0.0 ? var / (mean * mean) : 0.0);
  put(mean != 0.0 ? var / mean : 0.0);
  put(var > 0.0 ? mean * mean / var : 0.0);

  double abs_sum = 0.0;
  for (double v : x) abs_sum += std::abs(v);
  double entropy = 0.0;
  for (double v : x) {
    const double p = abs_sum > 0 ? std::abs(v) / abs_sum : 1.0 / dn;
    if (p > 0) entropy -= p * std::log(p);
  }
  put(entropy);
  put(n > 1 ? (entropy / std::log(2.0)) / std::log2(dn) : 0.0);
  double gini = 0.0;
  if (abs_sum > 0) {
    auto a = s;
    for (double& v : a) v = std::abs(v);
    std::sort(a.begin(), a.end());
    for (std::size_t i = 0; i < n; ++i) gini += (2.0 * static_cast<double>(i + 1) - dn - 1.0) * a[i];
    gini /= dn * abs_sum;
  }
  put(gini);

  const std::array<double, 5> marks = {mn, q1, med, q3, mx};
  double qgap = 0.0;
  for (int j = 0; j < 4; ++j) qgap = std::max(qgap, marks[j + 1] - marks[j]);
  put(qgap);
  const KMeans1D km = kmeans_1d(x, kLandmarkClusters);
  double cmin = std::numeric_limits<double>::infinity(), cmax = -cmin;
  for (int c = 0; c < kLandmarkClusters; ++c) {
    if (!km.sizes[c]) continue;
    cmin = std::min(cmin, km.centroids[c]);
    cmax = std::max(cmax, km.centroids[c]);
  }
  put(cmax - cmin);

  std::array<double, kHistogramBins> hist{};
  const double w = (mx - mn) / kHistogramBins;
  for (double v : x) {
    const int b = w > 0 ? std::min(static_cast<int>(std::floor((v - mn) / w)), kHistogramBins - 1) : 0;
    hist[b] += 1.0;
  }
  for (double h : hist) put(h / dn);

  double ssd = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - km.centroids[km.assignment[i]];
    ssd += d * d;
  }
  put(ssd);
  double silhouette = 0.0;
  const bool any_empty = std::any_of(km.sizes.begin(), km.sizes.end(), [](auto c) { return c == 0; });
  if (!any_empty) {
    std::vector<std::vector<double>> members(kLandmarkClusters), prefix(kLandmarkClusters);
    for (std::size_t i = 0; i < n; ++i) members[km.assignment[i]].push_back(x[i]);
    for (int c = 0; c < kLandmarkClusters; ++c) {
      std::sort(members[c].begin(), members[c].end());
      prefix[c].assign(members[c].size() + 1, 0.0);
      for (std::size_t j = 0; j < members[c].size(); ++j) prefix[c][j + 1] = prefix[c][j] + members[c][j];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int own = km.assignment[i];
      if (members[own].size() < 2) continue;  // singleton: s = 0
      const double a = abs_dev_sum(x[i], members[own], prefix[own]) / static_cast<double>(members[own].size() - 1);
      double b = std::numeric_limits<double>::infinity();
      for (int c = 0; c < kLandmarkClusters; ++c)
        if (c != own) b = std::min(b, abs_dev_sum(x[i], members[c], prefix[c]) / static_cast<double>(members[c].size()));
      const double denom = std::max(a, b);
      if (denom > 0) silhouette += (b - a) / denom;
    }
    silhouette /= dn;
  }
  put(silhouette);
  put(static_cast<double>(km.iterations));
  return f;
}

// ---------------------------------------------------------------------------
// Meta-feature vectors and the meta-feature matrix.

inline Vector meta_feature_vector_of(std::span<const double> encoded) {
  std::size_t missing = 0;
  for (double v : encoded) missing += std::isnan(v);
  const auto reps = representations_of(encoded);
  Vector out(kNumMetaFeatures);
  Eigen::Index at = 0;
  auto append = [&](const PsiVector& p) {
    for (double v : p) out[at++] = v;
  };
  std::vector<double> cell_values;
  for (const auto& rep : reps) {
    append(psi(rep, missing));
    for (std::size_t s = 0; s < kPartitionCells.size(); ++s) {
      for (const auto& cell : partition(rep, static_cast<PartitionScheme>(s), kPartitionCells[s])) {
        cell_values.clear();
        for (std::size_t i : cell) cell_values.push_back(rep[i]);
        append(psi(cell_values));
      }
    }
  }
  return out;
}

inline Vector meta_feature_vector(const AttributeColumn& column) {
  return meta_feature_vector_of(encode_column(column));
}

struct MetaFeatureMatrix {
  Matrix M;  // K x m, unit-norm columns in attribute-id order
  std::uint64_t layout_hash = 0;
};

inline void normalize_columns(Matrix& M) {
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    const double norm = M.col(j).norm();
    if (norm > 0) M.col(j) /= norm;
  }
}

inline MetaFeatureMatrix build_meta_feature_matrix(const Corpus& corpus) {
  MetaFeatureMatrix out;
  out.layout_hash = meta_feature_layout_hash();
  out.M.resize(kNumMetaFeatures, static_cast<Eigen::Index>(corpus.num_attributes()));
  for (const auto& ds : corpus.datasets)
    for (const auto& col : ds.columns) out.M.col(col.attribute_id) = meta_feature_vector(col);
  normalize_columns(out.M);
  return out;
}

inline void save_meta_feature_matrix(const MetaFeatureMatrix& mf, const std::string& path) {
  auto out = binio::open_out(path);
  binio::write_header(out, "PVMF", 1);
  binio::write_u64(out, static_cast<std::uint64_t>(mf.M.rows()));
  binio::write_u64(out, static_cast<std::uint64_t>(mf.M.cols()));
  binio::write_u64(out, mf.layout_hash);
  for (Eigen::Index j = 0; j < mf.M.cols(); ++j)
    for (Eigen::Index i = 0; i < mf.M.rows(); ++i) binio::write_f64(out, mf.M(i, j));
  if (!out) throw Error("failed writing '" + path + "'");
}

inline MetaFeatureMatrix load_meta_feature_matrix(const std::string& path) {
  auto in = binio::open_in(path);
  binio::read_header(in, "PVMF", 1);
  MetaFeatureMatrix mf;
  const auto rows = binio::read_u64(in);
  const auto cols = binio::read_u64(in);
  mf.layout_hash = binio::read_u64(in);
  if (rows > (1u << 24) || cols > (1u << 28)) throw ParseError("corrupt meta-feature matrix shape");
  mf.M.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < mf.M.cols(); ++j)
    for (Eigen::Index i = 0; i < mf.M.rows(); ++i) mf.M(i, j) = binio::read_f64(in);
  return mf;
}

// ---------------------------------------------------------------------------
// Meta-embedding: rank-r truncated SVD M ~ H diag(sigma) Q^T.

struct MetaEmbedding {
  Matrix H;      // K x r
  Vector sigma;  // r, non-increasing
  Matrix Q;      // m x r

  int rank() const { return static_cast<int>(sigma.size()); }
  Matrix reconstruction() const { return H * sigma.asDiagonal() * Q.transpose(); }
  // The r x m stand-in for M used by the compressed model variant.
  Matrix compressed() const { return sigma.asDiagonal() * Q.transpose(); }
};

inline MetaEmbedding fit_meta_embedding(const Matrix& M, int r) {
  const auto max_rank = std::min(M.rows(), M.cols());
  if (r < 1 || r > max_rank)
    throw ArgumentError("meta-embedding rank " + std::to_string(r) + " outside [1, " + std::to_string(max_rank) + "]");
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  MetaEmbedding me;
  me.H = svd.matrixU().leftCols(r);
  me.sigma = svd.singularValues().head(r);
  me.Q = svd.matrixV().leftCols(r);
  return me;
}

inline Vector embed_new_attribute(const MetaEmbedding& me, const Vector& m_hat, double tol = 1e-12) {
  if (m_hat.size() != me.H.rows())
    throw ArgumentError("meta-feature vector has length " + std::to_string(m_hat.size()) + ", expected " +
                        std::to_string(me.H.rows()));
  const double scale = me.sigma.size() ? std::max(me.sigma[0], 1.0) : 1.0;
  for (Eigen::Index i = 0; i < me.sigma.size(); ++i)
    if (me.sigma[i] <= tol * scale)
      throw NumericalError("meta-embedding is rank deficient at component " + std::to_string(i) +
                           "; reduce the rank");
  return (me.H.transpose() * m_hat).cwiseQuotient(me.sigma);
}

inline void save_meta_embedding(const MetaEmbedding& me, std::uint64_t layout_hash, const std::string& path) {
  auto out = binio::open_out(path);
  binio::write_header(out, "PVME", 1);
  binio::write_u64(out, layout_hash);
  binio::write_matrix(out, me.H);
  binio::write_matrix(out, me.sigma);
  binio::write_matrix(out, me.Q);
  if (!out) throw Error("failed writing '" + path + "'");
}

inline MetaEmbedding load_meta_embedding(const std::string& path, std::uint64_t* layout_hash = nullptr) {
  auto in = binio::open_in(path);
  binio::read_header(in, "PVME", 1);
  const auto hash = binio::read_u64(in);
  if (layout_hash) *layout_hash = hash;
  MetaEmbedding me;
  me.H = binio::read_matrix(in);
  me.sigma = binio::read_matrix(in);
  me.Q = binio::read_matrix(in);
  return me;
}

}  // namespace pvis
