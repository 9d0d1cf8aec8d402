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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lexaos/aos_model.hpp"
#include "lexaos/metrics.hpp"

namespace lexaos {

struct TrainerOptions {
  double learning_rate = 5e-5;
  int batch_size = 32;
  int epochs = 30;
  int patience = 5;  // epochs without dev macro-F1 improvement; <= 0 disables
  std::uint64_t seed = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

inline void to_json(nlohmann::json& j, const TrainerOptions& o) {
  j = nlohmann::json{{"optimizer", "adam"},      {"learning_rate", o.learning_rate},
                     {"batch_size", o.batch_size}, {"batch_loss", "sum"},
                     {"epochs", o.epochs},        {"patience", o.patience},
                     {"seed", o.seed},            {"beta1", o.beta1},
                     {"beta2", o.beta2},          {"epsilon", o.epsilon}};
}

inline void from_json(const nlohmann::json& j, TrainerOptions& o) {
  o.learning_rate = j.value("learning_rate", o.learning_rate);
  o.batch_size = j.value("batch_size", o.batch_size);
  o.epochs = j.value("epochs", o.epochs);
  o.patience = j.value("patience", o.patience);
  o.seed = j.value("seed", o.seed);
  o.beta1 = j.value("beta1", o.beta1);
  o.beta2 = j.value("beta2", o.beta2);
  o.epsilon = j.value("epsilon", o.epsilon);
}

class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

template <typename Scalar>
class Adam {
 public:
  Adam(const ModelConfig& cfg, const TrainerOptions& opt)
      : opt_(opt), m_(AosParameters<Scalar>::zeros(cfg)), v_(AosParameters<Scalar>::zeros(cfg)) {}

  void step(AosParameters<Scalar>& params, const AosParameters<Scalar>& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
    auto p = params.tensors(1);
    auto g = grad.tensors(1);
    auto m = m_.tensors(1);
    auto v = v_.tensors(1);
    const auto b1 = static_cast<Scalar>(opt_.beta1);
    const auto b2 = static_cast<Scalar>(opt_.beta2);
    for (std::size_t t = 0; t < p.size(); ++t) {
      for (std::size_t k = 0; k < p[t].values.size(); ++k) {
        const Scalar gk = g[t].values[k];
        m[t].values[k] = b1 * m[t].values[k] + (1 - b1) * gk;
        v[t].values[k] = b2 * v[t].values[k] + (1 - b2) * gk * gk;
        const double m_hat = static_cast<double>(m[t].values[k]) / c1;
        const double v_hat = static_cast<double>(v[t].values[k]) / c2;
        p[t].values[k] -= static_cast<Scalar>(opt_.learning_rate * m_hat / (std::sqrt(v_hat) + opt_.epsilon));
      }
    }
  }

  long steps() const { return t_; }

 private:
  TrainerOptions opt_;
  AosParameters<Scalar> m_, v_;
  long t_ = 0;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_micro_f1 = 0.0;
  double dev_macro_f1 = 0.0;
};

template <typename Scalar>
struct TrainResult {
  AosParameters<Scalar> params;
  std::vector<EpochRecord> history;
  int best_epoch = 0;  // 0: the initial parameters
  std::optional<EpochRecord> best;
};

template <typename Scalar>
std::vector<PredictionSet> predict_all(const AosParameters<Scalar>& params, const ModelConfig& cfg,
                                       std::span<const EmbeddedCase<Scalar>> cases, const Matrix<Scalar>& y) {
  std::vector<PredictionSet> out;
  out.reserve(cases.size());
  for (const auto& c : cases) {
    auto p = predict(params, cfg, c.sentences, y);
    p.case_id = c.case_id;
    out.push_back(std::move(p));
  }
  return out;
}

template <typename Scalar>
LabelConfusion evaluate_confusion(const AosParameters<Scalar>& params, const ModelConfig& cfg,
                                  std::span<const EmbeddedCase<Scalar>> cases, const Matrix<Scalar>& y) {
  LabelConfusion c(static_cast<std::size_t>(cfg.num_statutes));
  for (const auto& ec : cases) c.add(predict(params, cfg, ec.sentences, y).predicted, ec.gold);
  return c;
}

// Mini-batch Adam on the summed batch loss. After every epoch the dev split
// is scored and the best-dev-macro-F1 parameters are kept; with an empty dev
// split the last epoch wins. Deterministic for a fixed options.seed.
template <typename Scalar>
TrainResult<Scalar> train(AosParameters<Scalar> params, const ModelConfig& cfg,
                          std::span<const EmbeddedCase<Scalar>> train_set, std::span<const EmbeddedCase<Scalar>> dev_set,
                          const Matrix<Scalar>& y, const TrainerOptions& opt,
                          const std::function<void(const EpochRecord&)>& on_epoch = {}) {
  cfg.validate();
  if (opt.batch_size < 1) throw UserError("batch size must be >= 1");
  if (!(opt.learning_rate > 0.0)) throw UserError("learning rate must be > 0");

  TrainResult<Scalar> result;
  result.params = params;
  if (opt.epochs <= 0 || train_set.empty()) return result;

  std::mt19937_64 rng(opt.seed);
  Adam<Scalar> adam(cfg, opt);
  auto grad = AosParameters<Scalar>::zeros(cfg);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  int stale = 0;

  for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    const std::size_t bs = static_cast<std::size_t>(opt.batch_size);
    for (std::size_t start = 0, batch = 0; start < order.size(); start += bs, ++batch) {
      grad.set_zero();
      double batch_loss = 0.0;
      const std::string where = "epoch " + std::to_string(epoch) + " batch " + std::to_string(batch);
      for (std::size_t k = start; k < std::min(order.size(), start + bs); ++k) {
        const auto& ex = train_set[order[k]];
        try {
          const auto tr = forward_training(params, cfg, ex.sentences, y, rng());
          batch_loss += static_cast<double>(loss(tr, ex.gold, cfg).total);
          backward_accumulate(params, cfg, ex.sentences, y, ex.gold, tr, grad);
        } catch (const NonFiniteError& e) {
          throw TrainingDiverged("non-finite loss at " + where + " (case " + ex.case_id + "): " + e.what());
        }
      }
      if (!std::isfinite(batch_loss) || !grad.all_finite()) throw TrainingDiverged("non-finite loss at " + where);
      epoch_loss += batch_loss;
      adam.step(params, grad);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(train_set.size());
    if (!dev_set.empty()) {
      const auto conf = evaluate_confusion(params, cfg, dev_set, y);
      rec.dev_micro_f1 = micro_prf(conf).f1;
      rec.dev_macro_f1 = macro_prf(conf).f1;
    }
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (dev_set.empty()) {
      result.params = params;
      result.best_epoch = epoch;
      result.best = rec;
      continue;
    }
    if (!result.best || rec.dev_macro_f1 > result.best->dev_macro_f1) {
      result.params = params;
      result.best_epoch = epoch;
      result.best = rec;
      stale = 0;
    } else if (opt.patience > 0 && ++stale >= opt.patience) {
      break;
    }
  }
  return result;
}

}  // namespace lexaos
