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

// Deep personalized visualization scoring. A tower MLP reads the frozen CMF
// embeddings of (user, configuration, attributes) and outputs the probability
// that the user finds the visualization relevant; the blended model mixes that
// probability with the raw CMF score.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pvis/candidates.hpp"
#include "pvis/common.hpp"
#include "pvis/factorization.hpp"

namespace pvis {

enum class Activation { relu, sigmoid, tanh };
inline constexpr std::array<std::string_view, 3> kActivationNames = {"relu", "sigmoid", "tanh"};

inline std::string_view to_string(Activation a) { return kActivationNames[static_cast<int>(a)]; }

inline Activation parse_activation(std::string_view s) {
  for (std::size_t i = 0; i < kActivationNames.size(); ++i)
    if (kActivationNames[i] == s) return static_cast<Activation>(i);
  throw ArgumentError("unknown activation '" + std::string(s) + "' (expected relu, sigmoid or tanh)");
}

inline double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Widths of an L-layer tower ending at d: d*2^(L-1), ..., 2d, d.
inline std::vector<int> auto_tower_widths(int layers, int d) {
  if (layers < 1 || d < 1) throw ArgumentError("tower needs layers >= 1 and d >= 1");
  std::vector<int> w(layers);
  for (int l = 0; l < layers; ++l) w[l] = d << (layers - 1 - l);
  return w;
}

// A tower halves its width at every layer and ends at d.
inline void validate_tower(std::span<const int> widths, int d) {
  if (widths.empty()) throw ArgumentError("tower needs at least one hidden layer");
  if (widths.back() != d)
    throw ArgumentError("last hidden width " + std::to_string(widths.back()) + " must equal d=" + std::to_string(d));
  for (std::size_t l = 0; l + 1 < widths.size(); ++l)
    if (widths[l] != 2 * widths[l + 1])
      throw ArgumentError("tower widths must halve per layer (got " + std::to_string(widths[l]) + " then " +
                          std::to_string(widths[l + 1]) + ")");
}

struct MlpParams {
  std::vector<Matrix> W;  // W[l]: widths[l] x fan_in
  std::vector<Vector> b;
  Vector h;               // output weights, length widths.back()
  Activation activation = Activation::relu;

  int input_dim() const { return W.empty() ? 0 : static_cast<int>(W[0].cols()); }
  int layers() const { return static_cast<int>(W.size()); }
  std::size_t num_parameters() const {
    std::size_t n = static_cast<std::size_t>(h.size());
    for (std::size_t l = 0; l < W.size(); ++l) n += static_cast<std::size_t>(W[l].size() + b[l].size());
    return n;
  }
};

// Glorot-uniform weights, zero biases.
inline MlpParams make_mlp(int input_dim, std::span<const int> widths, Activation act, std::uint64_t seed) {
  if (input_dim < 1) throw ArgumentError("input dimension must be >= 1");
  Rng rng(seed);
  MlpParams p;
  p.activation = act;
  int fan_in = input_dim;
  auto glorot = [&](int rows, int cols) {
    const double limit = std::sqrt(6.0 / (rows + cols));
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-limit, limit);
    return m;
  };
  for (int w : widths) {
    if (w < 1) throw ArgumentError("layer widths must be >= 1");
    p.W.push_back(glorot(w, fan_in));
    p.b.push_back(Vector::Zero(w));
    fan_in = w;
  }
  p.h = glorot(fan_in, 1).col(0);
  return p;
}

inline MlpParams make_tower(int input_dim, std::span<const int> widths, int d, Activation act, std::uint64_t seed) {
  validate_tower(widths, d);
  return make_mlp(input_dim, widths, act, seed);
}

// ---------------------------------------------------------------------------
// Forward / loss / backward over a column batch X (input_dim x B).

namespace nn_detail {

inline Matrix activate(const Matrix& z, Activation a) {
  switch (a) {
    case Activation::relu:
      return z.cwiseMax(0.0);
    case Activation::sigmoid:
      return z.unaryExpr([](double v) { return logistic(v); });
    case Activation::tanh:
      return z.array().tanh().matrix();
  }
  return z;
}

// derivative expressed through the pre-activation z and activation a
inline Matrix activation_grad(const Matrix& z, const Matrix& a, Activation act) {
  switch (act) {
    case Activation::relu:
      return z.unaryExpr([](double v) { return v > 0 ? 1.0 : 0.0; });
    case Activation::sigmoid:
      return a.cwiseProduct((1.0 - a.array()).matrix());
    case Activation::tanh:
      return (1.0 - a.array().square()).matrix();
  }
  return z;
}

}  // namespace nn_detail

struct ForwardCache {
  std::vector<Matrix> z;  // pre-activations per layer
  std::vector<Matrix> a;  // a[0] = input, a[l+1] = activation of layer l
  RowVector logits;
  RowVector prediction;
};

inline ForwardCache forward_batch(const MlpParams& p, const Matrix& X) {
  if (X.rows() != p.input_dim()) throw ArgumentError("input has wrong dimension");
  ForwardCache c;
  c.a.push_back(X);
  for (int l = 0; l < p.layers(); ++l) {
    Matrix z = p.W[l] * c.a.back();
    z.colwise() += p.b[l];
    c.a.push_back(nn_detail::activate(z, p.activation));
    c.z.push_back(std::move(z));
  }
  c.logits = p.h.transpose() * c.a.back();
  c.prediction = c.logits.unaryExpr([](double v) { return logistic(v); });
  return c;
}

inline double forward(const MlpParams& p, const Vector& x) { return forward_batch(p, x).prediction[0]; }

inline constexpr double kPredictionClamp = 1e-12;

// Summed binary cross-entropy with predictions clamped to [1e-12, 1 - 1e-12].
inline double bce_loss(std::span<const double> predictions, std::span<const double> labels) {
  if (predictions.size() != labels.size()) throw ArgumentError("one label per prediction required");
  double loss = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double y = std::clamp(predictions[i], kPredictionClamp, 1.0 - kPredictionClamp);
    loss -= labels[i] * std::log(y) + (1.0 - labels[i]) * std::log(1.0 - y);
  }
  return loss;
}

inline double bce_loss(const RowVector& predictions, const RowVector& labels) {
  return bce_loss(std::span<const double>(predictions.data(), predictions.size()),
                  std::span<const double>(labels.data(), labels.size()));
}

struct MlpGradients {
  std::vector<Matrix> W;
  std::vector<Vector> b;
  Vector h;
  Matrix input;  // dLoss/dX, used when the inputs themselves are trained
};

// Exact gradients of the summed BCE (unclamped logistic form, y_hat - y at the
// logit).
inline MlpGradients backward(const MlpParams& p, const ForwardCache& c, const RowVector& labels) {
  MlpGradients g;
  const RowVector delta_out = c.prediction - labels;
  g.h = c.a.back() * delta_out.transpose();
  Matrix delta = (p.h * delta_out).cwiseProduct(nn_detail::activation_grad(c.z.back(), c.a.back(), p.activation));
  g.W.resize(p.layers());
  g.b.resize(p.layers());
  for (int l = p.layers() - 1; l >= 0; --l) {
    g.W[l] = delta * c.a[l].transpose();
    g.b[l] = delta.rowwise().sum();
    Matrix back = p.W[l].transpose() * delta;
    if (l > 0) {
      delta = back.cwiseProduct(nn_detail::activation_grad(c.z[l - 1], c.a[l], p.activation));
    } else {
      g.input = std::move(back);
    }
  }
  return g;
}

// Adam with bias correction.
class Adam {
 public:
  explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  // Updates `param` in place; `slot` identifies the parameter's moment state.
  template <typename Derived, typename GradDerived>
  void step(std::size_t slot, Eigen::MatrixBase<Derived>& param, const Eigen::MatrixBase<GradDerived>& grad) {
    if (slot >= m_.size()) {
      m_.resize(slot + 1);
      v_.resize(slot + 1);
    }
    if (m_[slot].size() == 0) {
      m_[slot] = Matrix::Zero(param.rows(), param.cols());
      v_[slot] = Matrix::Zero(param.rows(), param.cols());
    }
    m_[slot] = beta1_ * m_[slot] + (1 - beta1_) * grad;
    v_[slot] = beta2_ * v_[slot] + (1 - beta2_) * grad.cwiseProduct(grad);
    const double c1 = 1 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1 - std::pow(beta2_, static_cast<double>(t_));
    param -= (lr_ * (m_[slot] / c1).array() / ((v_[slot] / c2).array().sqrt() + eps_)).matrix();
  }
  // Call once per optimizer step, before the per-parameter updates.
  void tick() { ++t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long long t_ = 0;
  std::vector<Matrix> m_, v_;
};

inline void adam_update(Adam& opt, MlpParams& p, const MlpGradients& g) {
  std::size_t slot = 0;
  for (int l = 0; l < p.layers(); ++l) {
    opt.step(slot++, p.W[l], g.W[l]);
    opt.step(slot++, p.b[l], g.b[l]);
  }
  opt.step(slot++, p.h, g.h);
}

// ---------------------------------------------------------------------------
// Training examples.

struct TrainExample {
  int user = 0;
  int config = 0;
  std::vector<int> attributes;  // at most s_max ids; remaining slots are zero-padded
  double label = 0.0;
};

// phi = [u_i; z_t; v_r1; ...; v_rs; 0 ...], length (2 + s_max) d
inline Vector build_input(const EmbeddingSet& E, const TrainExample& ex, int s_max) {
  const int d = E.d();
  if (static_cast<int>(ex.attributes.size()) > s_max)
    throw ArgumentError("visualization binds more attributes than s_max=" + std::to_string(s_max));
  Vector x = Vector::Zero((2 + s_max) * d);
  x.segment(0, d) = E.U.row(ex.user).transpose();
  x.segment(d, d) = E.Z.row(ex.config).transpose();
  for (std::size_t k = 0; k < ex.attributes.size(); ++k)
    x.segment((2 + static_cast<int>(k)) * d, d) = E.V.row(ex.attributes[k]).transpose();
  return x;
}

// Training positives grouped by (user, dataset) with their candidate spaces.
class NegativeSampler {
 public:
  NegativeSampler(const CandidateIndex& index, std::span<const VisualizationSpec> positives) : index_(&index) {
    for (const auto& v : positives) known_[{v.user_id, v.dataset_id}].insert(candidate_of(v));
  }

  // One negative for (user, dataset) by rejection sampling; nullopt when every
  // candidate is a known positive.
  std::optional<Candidate> draw(int user, int dataset, Rng& rng) const {
    const auto& space = index_->of(dataset);
    if (space.empty()) return std::nullopt;
    const auto it = known_.find({user, dataset});
    static const std::set<Candidate> kNone;
    const auto& pos = it == known_.end() ? kNone : it->second;
    if (pos.size() >= space.size()) return std::nullopt;
    for (int attempt = 0; attempt < 64; ++attempt) {
      const auto& c = space[rng.below(space.size())];
      if (!pos.count(c)) return c;
    }
    std::vector<Candidate> one = sample_negatives(space, pos, 1, rng);
    if (one.empty()) return std::nullopt;
    return one[0];
  }

 private:
  const CandidateIndex* index_;
  std::map<std::pair<int, int>, std::set<Candidate>> known_;
};

// Positives plus neg_per_pos fresh negatives for each, shuffled.
inline std::vector<TrainExample> epoch_examples(std::span<const VisualizationSpec> positives,
                                                const NegativeSampler& sampler, int neg_per_pos, Rng& rng) {
  std::vector<TrainExample> out;
  out.reserve(positives.size() * static_cast<std::size_t>(1 + neg_per_pos));
  for (const auto& v : positives) {
    out.push_back({v.user_id, v.config_id, v.attribute_ids, 1.0});
    for (int k = 0; k < neg_per_pos; ++k) {
      if (auto c = sampler.draw(v.user_id, v.dataset_id, rng)) out.push_back({v.user_id, c->config_id, c->attribute_ids, 0.0});
    }
  }
  rng.shuffle(out);
  return out;
}

// ---------------------------------------------------------------------------
// Neural PVisRec.

struct NeuralConfig {
  int layers = 3;
  std::vector<int> widths;  // empty: auto tower ending at d
  Activation activation = Activation::relu;
  double lr = 1e-3;
  int epochs = 20;
  int batch_size = 256;
  int neg_per_pos = 5;
  int s_max = 3;
  std::uint64_t seed = 1;
  double alpha = 0.5;           // blend weight of the MLP in Neural-CMF
  bool minmax_cmf = false;      // per-slate min-max scaling of the CMF term

  void validate() const {
    if (lr <= 0) throw ArgumentError("lr must be > 0");
    if (epochs < 0) throw ArgumentError("epochs must be >= 0");
    if (batch_size < 1) throw ArgumentError("batch size must be >= 1");
    if (neg_per_pos < 0) throw ArgumentError("neg_per_pos must be >= 0");
    if (s_max < 1) throw ArgumentError("s_max must be >= 1");
    if (!(alpha > 0 && alpha < 1)) throw ArgumentError("alpha must lie in (0, 1)");
  }
  std::vector<int> tower(int d) const { return widths.empty() ? auto_tower_widths(layers, d) : widths; }
};

struct NeuralModel {
  MlpParams params;
  int s_max = 3;
  std::vector<double> epoch_loss;  // mean BCE per example, per epoch
};

// Mini-batch Adam over a fixed example stream. `examples_for_epoch` supplies
// each epoch's (re-sampled) examples; `input_of` maps an example to phi.
// `on_batch` (optional) receives input gradients for trainable inputs.
inline std::vector<double> train_mlp(
    MlpParams& params, const NeuralConfig& cfg,
    const std::function<std::vector<TrainExample>(int epoch, Rng&)>& examples_for_epoch,
    const std::function<Vector(const TrainExample&)>& input_of,
    const std::function<void(std::span<const TrainExample>, const Matrix&)>& on_batch = {}) {
  Rng rng(mix_seed(cfg.seed, 0x6e6575ULL));
  Adam adam(cfg.lr);
  std::vector<double> losses;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto examples = examples_for_epoch(epoch, rng);
    double total = 0.0;
    for (std::size_t start = 0; start < examples.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(examples.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const auto batch = std::span<const TrainExample>(examples).subspan(start, end - start);
      Matrix X(params.input_dim(), static_cast<Eigen::Index>(batch.size()));
      RowVector y(static_cast<Eigen::Index>(batch.size()));
      for (std::size_t i = 0; i < batch.size(); ++i) {
        X.col(static_cast<Eigen::Index>(i)) = input_of(batch[i]);
        y[static_cast<Eigen::Index>(i)] = batch[i].label;
      }
      const ForwardCache cache = forward_batch(params, X);
      const double loss = bce_loss(cache.prediction, y);
      if (!std::isfinite(loss))
        throw NumericalError("neural training diverged (non-finite loss) in epoch " + std::to_string(epoch + 1));
      total += loss;
      const MlpGradients g = backward(params, cache, y);
      adam.tick();
      adam_update(adam, params, g);
      if (on_batch) on_batch(batch, g.input);
    }
    losses.push_back(examples.empty() ? 0.0 : total / static_cast<double>(examples.size()));
  }
  return losses;
}

inline NeuralModel train_neural(const EmbeddingSet& E, const CandidateIndex& index,
                                std::span<const VisualizationSpec> train, const NeuralConfig& cfg) {
  cfg.validate();
  NeuralModel model;
  model.s_max = cfg.s_max;
  const auto tower = cfg.tower(E.d());
  model.params = make_tower((2 + cfg.s_max) * E.d(), tower, E.d(), cfg.activation, cfg.seed);
  std::vector<VisualizationSpec> usable;
  for (const auto& v : train)
    if (static_cast<int>(v.attribute_ids.size()) <= cfg.s_max) usable.push_back(v);
  const NegativeSampler sampler(index, usable);
  model.epoch_loss = train_mlp(
      model.params, cfg,
      [&](int, Rng& rng) { return epoch_examples(usable, sampler, cfg.neg_per_pos, rng); },
      [&](const TrainExample& ex) { return build_input(E, ex, cfg.s_max); });
  return model;
}

inline double score_neural(const EmbeddingSet& E, const NeuralModel& model, int user, const Candidate& c) {
  if (static_cast<int>(c.attribute_ids.size()) > model.s_max) return 0.0;
  return forward(model.params, build_input(E, {user, c.config_id, c.attribute_ids, 0.0}, model.s_max));
}

// (1 - alpha) * CMF score + alpha * MLP probability.
inline double score_neural_cmf(const EmbeddingSet& E, const NeuralModel& model, double alpha, int user,
                               const Candidate& c) {
  return (1.0 - alpha) * score_visualization(E, user, c) + alpha * score_neural(E, model, user, c);
}

// Slate scoring for the blended model; with `minmax_cmf` the CMF term is
// rescaled to [0, 1] over the slate before blending.
inline std::vector<double> score_neural_cmf_slate(const EmbeddingSet& E, const NeuralModel& model, double alpha,
                                                  bool minmax_cmf, int user, std::span<const Candidate> slate) {
  std::vector<double> cmf, out;
  for (const auto& c : slate) cmf.push_back(score_visualization(E, user, c));
  if (minmax_cmf && !cmf.empty()) {
    const auto [lo, hi] = std::minmax_element(cmf.begin(), cmf.end());
    const double a = *lo, range = *hi - *lo;
    for (double& v : cmf) v = range > 0 ? (v - a) / range : 0.0;
  }
  for (std::size_t i = 0; i < slate.size(); ++i)
    out.push_back((1.0 - alpha) * cmf[i] + alpha * score_neural(E, model, user, slate[i]));
  return out;
}

// ---------------------------------------------------------------------------
// MLP baseline: the same tower, but over its own embedding tables, which are
// learned jointly with the network instead of taken from CMF.

struct MlpBaselineModel {
  EmbeddingSet tables;  // U, V, Z used as lookup tables; Y unused
  NeuralModel net;
};

inline MlpBaselineModel train_mlp_baseline(int num_users, int num_attributes, int num_configs, int d,
                                           const CandidateIndex& index, std::span<const VisualizationSpec> train,
                                           const NeuralConfig& cfg) {
  cfg.validate();
  if (d < 1) throw ArgumentError("d must be >= 1");
  MlpBaselineModel model;
  Rng init(mix_seed(cfg.seed, 0x7461626cULL));
  auto table = [&](int rows) {
    Matrix t(rows, d);
    for (auto& v : t.reshaped()) v = init.normal() * 0.1;
    return t;
  };
  model.tables.U = table(num_users);
  model.tables.V = table(num_attributes);
  model.tables.Z = table(num_configs);
  model.tables.variant = Variant::acd;
  model.net.s_max = cfg.s_max;
  model.net.params = make_tower((2 + cfg.s_max) * d, cfg.tower(d), d, cfg.activation, cfg.seed);

  std::vector<VisualizationSpec> usable;
  for (const auto& v : train)
    if (static_cast<int>(v.attribute_ids.size()) <= cfg.s_max) usable.push_back(v);
  const NegativeSampler sampler(index, usable);
  Adam table_adam(cfg.lr);
  Matrix gU, gV, gZ;
  model.net.epoch_loss = train_mlp(
      model.net.params, cfg,
      [&](int, Rng& rng) { return epoch_examples(usable, sampler, cfg.neg_per_pos, rng); },
      [&](const TrainExample& ex) { return build_input(model.tables, ex, cfg.s_max); },
      [&](std::span<const TrainExample> batch, const Matrix& dX) {
        gU.setZero(model.tables.U.rows(), d);
        gV.setZero(model.tables.V.rows(), d);
        gZ.setZero(model.tables.Z.rows(), d);
        for (std::size_t c = 0; c < batch.size(); ++c) {
          const auto col = dX.col(static_cast<Eigen::Index>(c));
          gU.row(batch[c].user) += col.segment(0, d).transpose();
          gZ.row(batch[c].config) += col.segment(d, d).transpose();
          for (std::size_t k = 0; k < batch[c].attributes.size(); ++k)
            gV.row(batch[c].attributes[k]) += col.segment((2 + static_cast<Eigen::Index>(k)) * d, d).transpose();
        }
        table_adam.tick();
        table_adam.step(0, model.tables.U, gU);
        table_adam.step(1, model.tables.V, gV);
        table_adam.step(2, model.tables.Z, gZ);
      });
  return model;
}

inline double score_mlp_baseline(const MlpBaselineModel& m, int user, const Candidate& c) {
  return score_neural(m.tables, m.net, user, c);
}

// ---------------------------------------------------------------------------
// Container: "PVNN", version, s_max, activation, layers.

inline void write_mlp(std::ostream& out, const MlpParams& p) {
  binio::write_string(out, to_string(p.activation));
  binio::write_u64(out, static_cast<std::uint64_t>(p.layers()));
  for (int l = 0; l < p.layers(); ++l) {
    binio::write_matrix(out, p.W[l]);
    binio::write_matrix(out, p.b[l]);
  }
  binio::write_matrix(out, p.h);
}

inline MlpParams read_mlp(std::istream& in) {
  MlpParams p;
  p.activation = parse_activation(binio::read_string(in));
  const auto layers = binio::read_u64(in);
  if (layers > 64) throw ParseError("corrupt layer count");
  for (std::uint64_t l = 0; l < layers; ++l) {
    p.W.push_back(binio::read_matrix(in));
    p.b.push_back(binio::read_matrix(in));
  }
  p.h = binio::read_matrix(in);
  return p;
}

inline void save_neural(const NeuralModel& m, const std::string& path) {
  auto out = binio::open_out(path);
  binio::write_header(out, "PVNN", 1);
  binio::write_u64(out, static_cast<std::uint64_t>(m.s_max));
  write_mlp(out, m.params);
  binio::write_u64(out, m.epoch_loss.size());
  for (double v : m.epoch_loss) binio::write_f64(out, v);
  if (!out) throw Error("failed writing '" + path + "'");
}

inline NeuralModel load_neural(const std::string& path) {
  auto in = binio::open_in(path);
  binio::read_header(in, "PVNN", 1);
  NeuralModel m;
  m.s_max = static_cast<int>(binio::read_u64(in));
  m.params = read_mlp(in);
  const auto n = binio::read_u64(in);
  if (n > (1u << 20)) throw ParseError("corrupt loss trace");
  for (std::uint64_t i = 0; i < n; ++i) m.epoch_loss.push_back(binio::read_f64(in));
  return m;
}

inline void save_mlp_baseline(const MlpBaselineModel& m, const std::string& path) {
  auto out = binio::open_out(path);
  binio::write_header(out, "PVMB", 1);
  binio::write_matrix(out, m.tables.U);
  binio::write_matrix(out, m.tables.V);
  binio::write_matrix(out, m.tables.Z);
  binio::write_u64(out, static_cast<std::uint64_t>(m.net.s_max));
  write_mlp(out, m.net.params);
  if (!out) throw Error("failed writing '" + path + "'");
}

inline MlpBaselineModel load_mlp_baseline(const std::string& path) {
  auto in = binio::open_in(path);
  binio::read_header(in, "PVMB", 1);
  MlpBaselineModel m;
  m.tables.U = binio::read_matrix(in);
  m.tables.V = binio::read_matrix(in);
  m.tables.Z = binio::read_matrix(in);
  m.tables.variant = Variant::acd;
  m.net.s_max = static_cast<int>(binio::read_u64(in));
  m.net.params = read_mlp(in);
  return m;
}

}  // namespace pvis
