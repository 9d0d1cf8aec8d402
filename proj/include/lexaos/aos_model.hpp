// Copyright 2026 The lexaos Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Attention-over-sentences classifier.
//
// For statute i and head h the statute content embedding y_i forms the query
// and every sentence embedding x_j a key:
//
//   q      = W_q[i][h] y_i + b_q[i][h]
//   a_j    = (W_k[i][h] x_j + b_k[i][h]) . q / sqrt(D_attn)
//   alpha  = softmax(a)
//   c[i,h] = sum_j alpha_j x_j
//
// The head contexts are concatenated, passed through a hidden layer shared by
// all statutes, and a per-statute 2-way output layer:
//
//   h_i      = dropout(ReLU(W_h [c[i,1]; ...; c[i,H]] + b_h))
//   y_pred_i = softmax(W_o[i] h_i + b_o[i])
//
// Index kPositiveClass of y_pred_i is the probability that statute i applies.
// Sentence and statute embeddings are inputs only and never receive gradient.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lexaos/common.hpp"

namespace lexaos {

inline constexpr int kNegativeClass = 0;
inline constexpr int kPositiveClass = 1;
inline constexpr double kLogFloor = 1e-12;
inline constexpr double kDecisionThreshold = 0.5;

struct ModelConfig {
  int num_statutes = 1;
  int heads = 3;
  int input_dim = 768;
  int attention_dim = 100;
  int hidden_dim = 1536;
  double dropout = 0.1;
  double positive_weight = 3.0;
  double negative_weight = 1.0;
  int max_sentences = 150;

  void validate() const {
    if (num_statutes < 1 || heads < 1 || input_dim < 1 || attention_dim < 1 || hidden_dim < 1 || max_sentences < 1) {
      throw UserError("model dimensions must all be >= 1");
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) throw UserError("dropout must lie in [0, 1)");
    if (!(positive_weight > 0.0 && negative_weight > 0.0)) throw UserError("class weights must be > 0");
  }

  int concat_dim() const { return heads * input_dim; }

  bool operator==(const ModelConfig&) const = default;
};

inline void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"num_statutes", c.num_statutes},   {"heads", c.heads},
                     {"input_dim", c.input_dim},         {"attention_dim", c.attention_dim},
                     {"hidden_dim", c.hidden_dim},       {"dropout", c.dropout},
                     {"positive_weight", c.positive_weight}, {"negative_weight", c.negative_weight},
                     {"max_sentences", c.max_sentences}};
}

inline void from_json(const nlohmann::json& j, ModelConfig& c) {
  j.at("num_statutes").get_to(c.num_statutes);
  j.at("heads").get_to(c.heads);
  j.at("input_dim").get_to(c.input_dim);
  j.at("attention_dim").get_to(c.attention_dim);
  j.at("hidden_dim").get_to(c.hidden_dim);
  j.at("dropout").get_to(c.dropout);
  j.at("positive_weight").get_to(c.positive_weight);
  j.at("negative_weight").get_to(c.negative_weight);
  j.at("max_sentences").get_to(c.max_sentences);
}

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

// Flat, named view of one parameter tensor.
template <typename Scalar>
struct TensorView {
  std::string name;
  std::span<Scalar> values;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
};

template <typename Scalar>
struct AosParameters {
  // Attention tensors are indexed [i * heads + h].
  std::vector<Matrix<Scalar>> w_q;  // attention_dim x input_dim
  std::vector<Vector<Scalar>> b_q;  // attention_dim
  std::vector<Matrix<Scalar>> w_k;  // attention_dim x input_dim
  std::vector<Vector<Scalar>> b_k;  // attention_dim
  Matrix<Scalar> w_h;               // hidden_dim x heads*input_dim, shared
  Vector<Scalar> b_h;               // hidden_dim
  std::vector<Matrix<Scalar>> w_o;  // [i]: 2 x hidden_dim
  std::vector<Vector<Scalar>> b_o;  // [i]: 2

  static AosParameters zeros(const ModelConfig& cfg) {
    cfg.validate();
    AosParameters p;
    const std::size_t nh = static_cast<std::size_t>(cfg.num_statutes * cfg.heads);
    p.w_q.assign(nh, Matrix<Scalar>::Zero(cfg.attention_dim, cfg.input_dim));
    p.b_q.assign(nh, Vector<Scalar>::Zero(cfg.attention_dim));
    p.w_k.assign(nh, Matrix<Scalar>::Zero(cfg.attention_dim, cfg.input_dim));
    p.b_k.assign(nh, Vector<Scalar>::Zero(cfg.attention_dim));
    p.w_h = Matrix<Scalar>::Zero(cfg.hidden_dim, cfg.concat_dim());
    p.b_h = Vector<Scalar>::Zero(cfg.hidden_dim);
    p.w_o.assign(static_cast<std::size_t>(cfg.num_statutes), Matrix<Scalar>::Zero(2, cfg.hidden_dim));
    p.b_o.assign(static_cast<std::size_t>(cfg.num_statutes), Vector<Scalar>::Zero(2));
    return p;
  }

  // Fixed order; checkpoints, optimisers and gradient checks rely on it.
  // `heads` only affects the names.
  template <typename Self>
  static auto views_of(Self& self, int heads) {
    using S = std::conditional_t<std::is_const_v<Self>, const Scalar, Scalar>;
    std::vector<TensorView<S>> out;
    auto add = [&](std::string name, auto& t) {
      out.push_back({std::move(name), std::span<S>(t.data(), static_cast<std::size_t>(t.size())), t.rows(), t.cols()});
    };
    for (std::size_t k = 0; k < self.w_q.size(); ++k) {
      const std::string ih = std::to_string(k / static_cast<std::size_t>(heads)) + "/" +
                             std::to_string(k % static_cast<std::size_t>(heads));
      add("W_q/" + ih, self.w_q[k]);
      add("b_q/" + ih, self.b_q[k]);
      add("W_k/" + ih, self.w_k[k]);
      add("b_k/" + ih, self.b_k[k]);
    }
    add("W_h", self.w_h);
    add("b_h", self.b_h);
    for (std::size_t i = 0; i < self.w_o.size(); ++i) {
      add("W_o/" + std::to_string(i), self.w_o[i]);
      add("b_o/" + std::to_string(i), self.b_o[i]);
    }
    return out;
  }

  std::vector<TensorView<Scalar>> tensors(int heads) { return views_of(*this, heads); }
  std::vector<TensorView<const Scalar>> tensors(int heads) const { return views_of(*this, heads); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors(1)) n += t.values.size();
    return n;
  }

  bool all_finite() const {
    for (const auto& t : tensors(1)) {
      for (Scalar v : t.values) {
        if (!std::isfinite(v)) return false;
      }
    }
    return true;
  }

  void add_scaled(const AosParameters& other, Scalar scale) {
    auto dst = tensors(1);
    auto src = other.tensors(1);
    for (std::size_t t = 0; t < dst.size(); ++t) {
      for (std::size_t k = 0; k < dst[t].values.size(); ++k) dst[t].values[k] += scale * src[t].values[k];
    }
  }

  void set_zero() {
    for (auto& t : tensors(1)) std::fill(t.values.begin(), t.values.end(), Scalar(0));
  }

  Scalar squared_norm() const {
    Scalar s = 0;
    for (const auto& t : tensors(1)) {
      for (Scalar v : t.values) s += v * v;
    }
    return s;
  }

  bool operator==(const AosParameters& o) const {
    auto a = tensors(1);
    auto b = o.tensors(1);
    if (a.size() != b.size()) return false;
    for (std::size_t t = 0; t < a.size(); ++t) {
      if (a[t].rows != b[t].rows || a[t].cols != b[t].cols) return false;
      if (!std::equal(a[t].values.begin(), a[t].values.end(), b[t].values.begin())) return false;
    }
    return true;
  }
};

// Glorot-uniform weights, zero biases.
template <typename Scalar = double>
AosParameters<Scalar> init_parameters(const ModelConfig& cfg, std::uint64_t seed) {
  auto p = AosParameters<Scalar>::zeros(cfg);
  std::mt19937_64 rng(seed);
  for (auto& t : p.tensors(cfg.heads)) {
    if (t.name.front() != 'W') continue;
    // Weight tensors map cols (fan-in) to rows (fan-out).
    const double limit = std::sqrt(6.0 / static_cast<double>(t.rows + t.cols));
    std::uniform_real_distribution<double> uni(-limit, limit);
    for (auto& v : t.values) v = static_cast<Scalar>(uni(rng));
  }
  return p;
}

template <typename Scalar>
struct AttentionTrace {
  Vector<Scalar> query;    // q, attention_dim
  Vector<Scalar> logits;   // a, |C|
  Vector<Scalar> weights;  // alpha, |C|
};

template <typename Scalar>
struct ForwardTrace {
  std::vector<AttentionTrace<Scalar>> attention;  // [i * heads + h]
  Matrix<Scalar> contexts;        // N x heads*input_dim; row i is [c[i,1]; ...; c[i,H]]
  Matrix<Scalar> pre_activation;  // N x hidden_dim, W_h c_i + b_h
  Matrix<Scalar> hidden;          // N x hidden_dim, after ReLU and dropout
  Matrix<Scalar> probs;           // N x 2
  Matrix<Scalar> dropout_mask;    // N x hidden_dim of {0, 1/(1-p)}; empty at inference

  const AttentionTrace<Scalar>& head(int statute, int h, int heads) const {
    return attention[static_cast<std::size_t>(statute * heads + h)];
  }

  // c[i,h] as a view into `contexts`.
  auto context(int statute, int h, int input_dim) const {
    return contexts.row(statute).segment(static_cast<Eigen::Index>(h) * input_dim, input_dim);
  }

  Scalar positive_prob(int statute) const { return probs(statute, kPositiveClass); }
};

namespace detail {

template <typename Scalar>
void check_case_shapes(const ModelConfig& cfg, const Matrix<Scalar>& x, const Matrix<Scalar>& y) {
  if (x.rows() < 1) throw ShapeError("case matrix has no sentences");
  if (x.cols() != cfg.input_dim) {
    throw ShapeError("case matrix has " + std::to_string(x.cols()) + " columns, model expects " +
                     std::to_string(cfg.input_dim));
  }
  if (y.rows() != cfg.num_statutes || y.cols() != cfg.input_dim) {
    throw ShapeError("statute matrix is " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()) +
                     ", model expects " + std::to_string(cfg.num_statutes) + "x" + std::to_string(cfg.input_dim));
  }
}

template <typename Derived>
auto stable_softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  Vector<Scalar> e = (logits.array() - logits.maxCoeff()).exp().matrix();
  return Vector<Scalar>(e / e.sum());
}

}  // namespace detail

// Attention distribution of head h of statute i over the sentences of `x`.
// The key matrix is never formed: a = X (W_k^T q) + b_k . q, scaled.
template <typename Scalar>
AttentionTrace<Scalar> attention_weights(const AosParameters<Scalar>& params, const ModelConfig& cfg, int statute,
                                         int h, const Matrix<Scalar>& x, const Vector<Scalar>& statute_embedding) {
  if (x.rows() < 1 || x.cols() != cfg.input_dim || statute_embedding.size() != cfg.input_dim) {
    throw ShapeError("attention_weights: input shapes do not match the model config");
  }
  if (statute < 0 || statute >= cfg.num_statutes || h < 0 || h >= cfg.heads) {
    throw ShapeError("attention_weights: statute/head index out of range");
  }
  const auto k = static_cast<std::size_t>(statute * cfg.heads + h);
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(cfg.attention_dim));
  AttentionTrace<Scalar> t;
  t.query = params.w_q[k] * statute_embedding + params.b_q[k];
  const Vector<Scalar> key_proj = params.w_k[k].transpose() * t.query;
  t.logits = ((x * key_proj).array() + params.b_k[k].dot(t.query)).matrix() * scale;
  t.weights = detail::stable_softmax(t.logits);
  return t;
}

template <typename Scalar>
Matrix<Scalar> make_dropout_mask(const ModelConfig& cfg, std::uint64_t seed) {
  Matrix<Scalar> mask(cfg.num_statutes, cfg.hidden_dim);
  if (cfg.dropout == 0.0) {
    mask.setOnes();
    return mask;
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(1.0 - cfg.dropout);
  const Scalar kept = static_cast<Scalar>(1.0 / (1.0 - cfg.dropout));
  for (Eigen::Index k = 0; k < mask.size(); ++k) mask.data()[k] = keep(rng) ? kept : Scalar(0);
  return mask;
}

// Full forward pass. A non-null `dropout_mask` (N x hidden_dim) switches on
// training-mode dropout; null means inference.
template <typename Scalar>
ForwardTrace<Scalar> forward(const AosParameters<Scalar>& params, const ModelConfig& cfg, const Matrix<Scalar>& x,
                             const Matrix<Scalar>& y, const Matrix<Scalar>* dropout_mask = nullptr) {
  detail::check_case_shapes(cfg, x, y);
  if (x.rows() > cfg.max_sentences) {
    throw ShapeError("case has " + std::to_string(x.rows()) + " sentences, limit is " +
                     std::to_string(cfg.max_sentences));
  }
  const int n = cfg.num_statutes;
  ForwardTrace<Scalar> tr;
  tr.attention.reserve(static_cast<std::size_t>(n * cfg.heads));
  tr.contexts.resize(n, cfg.concat_dim());
  for (int i = 0; i < n; ++i) {
    const Vector<Scalar> yi = y.row(i).transpose();
    for (int h = 0; h < cfg.heads; ++h) {
      auto att = attention_weights(params, cfg, i, h, x, yi);
      tr.contexts.row(i).segment(static_cast<Eigen::Index>(h) * cfg.input_dim, cfg.input_dim) =
          (x.transpose() * att.weights).transpose();
      tr.attention.push_back(std::move(att));
    }
  }
  tr.pre_activation = (tr.contexts * params.w_h.transpose()).rowwise() + params.b_h.transpose();
  tr.hidden = tr.pre_activation.cwiseMax(Scalar(0));
  if (dropout_mask) {
    if (dropout_mask->rows() != n || dropout_mask->cols() != cfg.hidden_dim) {
      throw ShapeError("dropout mask shape does not match the model config");
    }
    tr.dropout_mask = *dropout_mask;
    tr.hidden = tr.hidden.cwiseProduct(*dropout_mask);
  }
  tr.probs.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    const Vector<Scalar> z = params.w_o[si] * tr.hidden.row(i).transpose() + params.b_o[si];
    tr.probs.row(i) = detail::stable_softmax(z).transpose();
    if (!tr.probs.row(i).allFinite()) {
      for (int h = 0; h < cfg.heads; ++h) {
        if (!tr.head(i, h, cfg.heads).weights.allFinite()) {
          throw NonFiniteError("non-finite attention for statute " + std::to_string(i) + " head " + std::to_string(h));
        }
      }
      throw NonFiniteError("non-finite output for statute " + std::to_string(i));
    }
  }
  return tr;
}

template <typename Scalar>
ForwardTrace<Scalar> forward_training(const AosParameters<Scalar>& params, const ModelConfig& cfg,
                                      const Matrix<Scalar>& x, const Matrix<Scalar>& y, std::uint64_t dropout_seed) {
  const auto mask = make_dropout_mask<Scalar>(cfg, dropout_seed);
  return forward(params, cfg, x, y, &mask);
}

// Inference-mode probability for a single statute; skips the other N-1
// attention blocks.
template <typename Scalar>
Scalar statute_probability(const AosParameters<Scalar>& params, const ModelConfig& cfg, const Matrix<Scalar>& x,
                           const Matrix<Scalar>& y, int statute) {
  detail::check_case_shapes(cfg, x, y);
  const Vector<Scalar> yi = y.row(statute).transpose();
  Vector<Scalar> c(cfg.concat_dim());
  for (int h = 0; h < cfg.heads; ++h) {
    const auto att = attention_weights(params, cfg, statute, h, x, yi);
    c.segment(static_cast<Eigen::Index>(h) * cfg.input_dim, cfg.input_dim) = x.transpose() * att.weights;
  }
  const Vector<Scalar> hid = (params.w_h * c + params.b_h).cwiseMax(Scalar(0));
  const auto si = static_cast<std::size_t>(statute);
  const Vector<Scalar> p = detail::stable_softmax(params.w_o[si] * hid + params.b_o[si]);
  return p(kPositiveClass);
}

template <typename Scalar>
struct LossBreakdown {
  Scalar total = 0;
  std::vector<Scalar> per_statute;
};

inline std::vector<char> label_membership(const LabelSet& gold, int num_statutes) {
  std::vector<char> in(static_cast<std::size_t>(num_statutes), 0);
  for (StatuteId g : gold) {
    if (g < 0 || g >= num_statutes) throw UserError("gold label " + std::to_string(g) + " out of range");
    in[static_cast<std::size_t>(g)] = 1;
  }
  return in;
}

// Class-weighted cross-entropy summed over statutes; log argument floored at
// kLogFloor.
template <typename Scalar>
LossBreakdown<Scalar> loss(const ForwardTrace<Scalar>& trace, const LabelSet& gold, const ModelConfig& cfg) {
  const auto in = label_membership(gold, cfg.num_statutes);
  LossBreakdown<Scalar> out;
  out.per_statute.resize(static_cast<std::size_t>(cfg.num_statutes));
  for (int i = 0; i < cfg.num_statutes; ++i) {
    const bool pos = in[static_cast<std::size_t>(i)] != 0;
    const Scalar w = static_cast<Scalar>(pos ? cfg.positive_weight : cfg.negative_weight);
    const Scalar p = trace.probs(i, pos ? kPositiveClass : kNegativeClass);
    const Scalar li = -w * std::log(std::max(p, static_cast<Scalar>(kLogFloor)));
    out.per_statute[static_cast<std::size_t>(i)] = li;
    out.total += li;
  }
  return out;
}

// Adds d(loss_total)/d(theta) for one instance into `grad`. `trace` must come
// from forward() on the same inputs (its dropout mask is reused). When
// `statutes` is non-empty only the listed statutes' loss terms contribute.
template <typename Scalar>
void backward_accumulate(const AosParameters<Scalar>& params, const ModelConfig& cfg, const Matrix<Scalar>& x,
                         const Matrix<Scalar>& y, const LabelSet& gold, const ForwardTrace<Scalar>& trace,
                         AosParameters<Scalar>& grad, const std::vector<char>& statutes = {}) {
  const int n = cfg.num_statutes;
  const auto in = label_membership(gold, n);

  // Output layer.
  Matrix<Scalar> d_hidden = Matrix<Scalar>::Zero(n, cfg.hidden_dim);
  for (int i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    if (!statutes.empty() && !statutes[si]) continue;
    const int cls = in[si] ? kPositiveClass : kNegativeClass;
    if (trace.probs(i, cls) <= static_cast<Scalar>(kLogFloor)) continue;  // clamped region is flat
    const Scalar w = static_cast<Scalar>(in[si] ? cfg.positive_weight : cfg.negative_weight);
    Vector<Scalar> dz = trace.probs.row(i).transpose() * w;
    dz(cls) -= w;
    grad.w_o[si].noalias() += dz * trace.hidden.row(i);
    grad.b_o[si] += dz;
    d_hidden.row(i) = (params.w_o[si].transpose() * dz).transpose();
  }

  // Dropout, ReLU, shared hidden layer.
  if (trace.dropout_mask.size() > 0) d_hidden = d_hidden.cwiseProduct(trace.dropout_mask);
  const Matrix<Scalar> d_pre =
      d_hidden.cwiseProduct((trace.pre_activation.array() > Scalar(0)).template cast<Scalar>().matrix());
  grad.w_h.noalias() += d_pre.transpose() * trace.contexts;
  grad.b_h += d_pre.colwise().sum().transpose();
  const Matrix<Scalar> d_contexts = d_pre * params.w_h;

  // Attention heads.
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(cfg.attention_dim));
  for (int i = 0; i < n; ++i) {
    if (!statutes.empty() && !statutes[static_cast<std::size_t>(i)]) continue;
    const Vector<Scalar> yi = y.row(i).transpose();
    for (int h = 0; h < cfg.heads; ++h) {
      const auto k = static_cast<std::size_t>(i * cfg.heads + h);
      const auto& att = trace.attention[k];
      const Vector<Scalar> d_ctx =
          d_contexts.row(i).segment(static_cast<Eigen::Index>(h) * cfg.input_dim, cfg.input_dim).transpose();
      const Vector<Scalar> d_alpha = x * d_ctx;
      const Vector<Scalar> d_logits =
          att.weights.cwiseProduct((d_alpha.array() - att.weights.dot(d_alpha)).matrix());
      const Vector<Scalar> x_dl = x.transpose() * d_logits;  // sum_j da_j x_j
      const Scalar sum_dl = d_logits.sum();
      grad.w_k[k].noalias() += (scale * att.query) * x_dl.transpose();
      grad.b_k[k] += (scale * sum_dl) * att.query;
      const Vector<Scalar> d_query = scale * (params.w_k[k] * x_dl + sum_dl * params.b_k[k]);
      grad.w_q[k].noalias() += d_query * yi.transpose();
      grad.b_q[k] += d_query;
    }
  }
}

template <typename Scalar>
AosParameters<Scalar> backward(const AosParameters<Scalar>& params, const ModelConfig& cfg, const Matrix<Scalar>& x,
                               const Matrix<Scalar>& y, const LabelSet& gold, const ForwardTrace<Scalar>& trace,
                               const std::vector<char>& statutes = {}) {
  auto grad = AosParameters<Scalar>::zeros(cfg);
  backward_accumulate(params, cfg, x, y, gold, trace, grad, statutes);
  return grad;
}

struct PredictionSet {
  std::string case_id;
  std::vector<double> probs;  // p_i for every statute
  LabelSet predicted;         // {i : p_i > 0.5}
};

inline LabelSet decide(const std::vector<double>& probs) {
  LabelSet out;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > kDecisionThreshold) out.push_back(static_cast<StatuteId>(i));
  }
  return out;
}

template <typename Scalar>
PredictionSet predict(const AosParameters<Scalar>& params, const ModelConfig& cfg, const Matrix<Scalar>& x,
                      const Matrix<Scalar>& y) {
  const auto tr = forward(params, cfg, x, y);
  PredictionSet out;
  for (int i = 0; i < cfg.num_statutes; ++i) out.probs.push_back(static_cast<double>(tr.positive_prob(i)));
  out.predicted = decide(out.probs);
  return out;
}

struct RankedStatute {
  StatuteId statute = 0;
  double prob = 0.0;

  bool operator==(const RankedStatute&) const = default;
};

// Highest-probability k statutes; ties go to the lower id.
inline std::vector<RankedStatute> top_k(const std::vector<double>& probs, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > probs.size()) {
    throw UserError("top_k: k must lie in [1, " + std::to_string(probs.size()) + "]");
  }
  std::vector<RankedStatute> all;
  for (std::size_t i = 0; i < probs.size(); ++i) all.push_back({static_cast<StatuteId>(i), probs[i]});
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.prob > b.prob; });
  all.resize(static_cast<std::size_t>(k));
  return all;
}

template <typename Scalar>
std::vector<RankedStatute> top_k(const AosParameters<Scalar>& params, const ModelConfig& cfg, const Matrix<Scalar>& x,
                                 const Matrix<Scalar>& y, int k) {
  return top_k(predict(params, cfg, x, y).probs, k);
}

// A case ready for the numeric core: embeddings plus gold labels.
template <typename Scalar>
struct EmbeddedCase {
  std::string case_id;
  Matrix<Scalar> sentences;  // |C| x input_dim
  LabelSet gold;
};

}  // namespace lexaos
