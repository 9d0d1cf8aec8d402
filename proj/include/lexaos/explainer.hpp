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

// Attention-based explanations and their counterfactual evaluation.
//
// The explanation of predicted statute t for case C is the set of sentences
// that receive the highest attention weight in at least one of t's heads.
//
// Necessity factor: share of (case, predicted statute) pairs whose statute is
// no longer predicted once the explanation sentences are deleted.
// Sufficiency factor: share of pairs whose statute is still predicted when the
// case is reduced to the explanation sentences alone.
//
// Counterfactual cases are built by deleting or selecting rows of the cached
// sentence matrix; sentences embed independently, so nothing is re-encoded.

#pragma once

#include <algorithm>
#include <future>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "lexaos/aos_model.hpp"
#include "lexaos/trainer.hpp"

namespace lexaos {

class NotPredicted : public UserError {
 public:
  using UserError::UserError;
};

struct HeadEvidence {
  int head = 0;
  int sentence = 0;
  double weight = 0.0;
};

struct Explanation {
  std::string case_id;
  StatuteId statute = 0;
  std::vector<int> sentence_indices;  // sorted, unique, 1..H entries
  std::vector<HeadEvidence> heads;    // one per head
};

template <typename Scalar>
Explanation explanation_from_trace(const ForwardTrace<Scalar>& trace, const ModelConfig& cfg, StatuteId statute) {
  Explanation e;
  e.statute = statute;
  std::set<int> picked;
  for (int h = 0; h < cfg.heads; ++h) {
    const auto& w = trace.head(statute, h, cfg.heads).weights;
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < w.size(); ++j) {
      if (w(j) > w(best)) best = j;  // strict: ties stay on the lowest index
    }
    e.heads.push_back({h, static_cast<int>(best), static_cast<double>(w(best))});
    picked.insert(static_cast<int>(best));
  }
  e.sentence_indices.assign(picked.begin(), picked.end());
  return e;
}

template <typename Scalar>
Explanation explain(const AosParameters<Scalar>& params, const ModelConfig& cfg, const std::string& case_id,
                    const Matrix<Scalar>& x, const Matrix<Scalar>& y, StatuteId statute) {
  if (statute < 0 || statute >= cfg.num_statutes) throw UserError("statute id out of range");
  const auto tr = forward(params, cfg, x, y);
  if (!(tr.positive_prob(statute) > kDecisionThreshold)) {
    throw NotPredicted("statute " + std::to_string(statute) + " is not predicted for case " + case_id);
  }
  auto e = explanation_from_trace(tr, cfg, statute);
  e.case_id = case_id;
  return e;
}

// Explanations for every predicted statute of one case, in statute order.
template <typename Scalar>
std::vector<Explanation> explain_case(const AosParameters<Scalar>& params, const ModelConfig& cfg,
                                      const std::string& case_id, const Matrix<Scalar>& x, const Matrix<Scalar>& y) {
  const auto tr = forward(params, cfg, x, y);
  std::vector<Explanation> out;
  for (int i = 0; i < cfg.num_statutes; ++i) {
    if (tr.positive_prob(i) > kDecisionThreshold) {
      out.push_back(explanation_from_trace(tr, cfg, i));
      out.back().case_id = case_id;
    }
  }
  return out;
}

template <typename Scalar>
Matrix<Scalar> select_rows(const Matrix<Scalar>& x, const std::vector<int>& rows) {
  Matrix<Scalar> out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = x.row(rows[k]);
  return out;
}

// `rows` sorted.
template <typename Scalar>
Matrix<Scalar> drop_rows(const Matrix<Scalar>& x, const std::vector<int>& rows) {
  std::vector<int> keep;
  for (int j = 0; j < static_cast<int>(x.rows()); ++j) {
    if (!std::binary_search(rows.begin(), rows.end(), j)) keep.push_back(j);
  }
  return select_rows(x, keep);
}

struct CounterfactualCounts {
  long total = 0;
  long nf_numerator = 0;  // removed, not re-predicted
  long sf_numerator = 0;  // retained, re-predicted

  CounterfactualCounts& operator+=(const CounterfactualCounts& o) {
    total += o.total;
    nf_numerator += o.nf_numerator;
    sf_numerator += o.sf_numerator;
    return *this;
  }
};

struct CounterfactualReport {
  CounterfactualCounts overall;
  std::vector<CounterfactualCounts> per_statute;

  long total() const { return overall.total; }
  double nf() const { return overall.total == 0 ? 0.0 : static_cast<double>(overall.nf_numerator) / overall.total; }
  double sf() const { return overall.total == 0 ? 0.0 : static_cast<double>(overall.sf_numerator) / overall.total; }

  CounterfactualReport& operator+=(const CounterfactualReport& o) {
    overall += o.overall;
    if (per_statute.size() < o.per_statute.size()) per_statute.resize(o.per_statute.size());
    for (std::size_t i = 0; i < o.per_statute.size(); ++i) per_statute[i] += o.per_statute[i];
    return *this;
  }
};

struct CounterfactualOptions {
  bool necessity = true;
  bool sufficiency = true;
  unsigned threads = 1;
};

namespace detail {

template <typename Scalar>
CounterfactualReport counterfactual_range(const AosParameters<Scalar>& params, const ModelConfig& cfg,
                                          std::span<const EmbeddedCase<Scalar>> cases, const Matrix<Scalar>& y,
                                          const CounterfactualOptions& opt) {
  CounterfactualReport rep;
  rep.per_statute.resize(static_cast<std::size_t>(cfg.num_statutes));
  for (const auto& c : cases) {
    const auto tr = forward(params, cfg, c.sentences, y);
    for (int t = 0; t < cfg.num_statutes; ++t) {
      if (!(tr.positive_prob(t) > kDecisionThreshold)) continue;
      const auto e = explanation_from_trace(tr, cfg, t);
      CounterfactualCounts cc;
      cc.total = 1;
      if (opt.necessity) {
        const auto rest = drop_rows(c.sentences, e.sentence_indices);
        // An emptied case carries no evidence, so the statute counts as gone.
        const bool again = rest.rows() > 0 && statute_probability(params, cfg, rest, y, t) > kDecisionThreshold;
        cc.nf_numerator = again ? 0 : 1;
      }
      if (opt.sufficiency) {
        const auto only = select_rows(c.sentences, e.sentence_indices);
        cc.sf_numerator = statute_probability(params, cfg, only, y, t) > kDecisionThreshold ? 1 : 0;
      }
      rep.overall += cc;
      rep.per_statute[static_cast<std::size_t>(t)] += cc;
    }
  }
  return rep;
}

}  // namespace detail

// Both factors over every (case, predicted statute) pair; they share one
// denominator. With threads > 1 cases are split into contiguous chunks and
// the counts summed.
template <typename Scalar>
CounterfactualReport evaluate_counterfactuals(const AosParameters<Scalar>& params, const ModelConfig& cfg,
                                              std::span<const EmbeddedCase<Scalar>> cases, const Matrix<Scalar>& y,
                                              const CounterfactualOptions& opt = {}) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(opt.threads, cases.size()));
  if (workers <= 1) return detail::counterfactual_range(params, cfg, cases, y, opt);
  std::vector<std::future<CounterfactualReport>> parts;
  const std::size_t chunk = (cases.size() + workers - 1) / workers;
  for (std::size_t lo = 0; lo < cases.size(); lo += chunk) {
    auto sub = cases.subspan(lo, std::min(chunk, cases.size() - lo));
    parts.push_back(std::async(std::launch::async, [&, sub] { return detail::counterfactual_range(params, cfg, sub, y, opt); }));
  }
  CounterfactualReport rep;
  rep.per_statute.resize(static_cast<std::size_t>(cfg.num_statutes));
  for (auto& f : parts) rep += f.get();
  return rep;
}

template <typename Scalar>
CounterfactualReport necessity_factor(const AosParameters<Scalar>& params, const ModelConfig& cfg,
                                      std::span<const EmbeddedCase<Scalar>> cases, const Matrix<Scalar>& y) {
  return evaluate_counterfactuals(params, cfg, cases, y, {.necessity = true, .sufficiency = false});
}

template <typename Scalar>
CounterfactualReport sufficiency_factor(const AosParameters<Scalar>& params, const ModelConfig& cfg,
                                        std::span<const EmbeddedCase<Scalar>> cases, const Matrix<Scalar>& y) {
  return evaluate_counterfactuals(params, cfg, cases, y, {.necessity = false, .sufficiency = true});
}

inline nlohmann::ordered_json counterfactual_json(const CounterfactualReport& rep,
                                                  const std::vector<std::string>& statute_names) {
  auto ratio = [](long num, long den) { return den == 0 ? 0.0 : static_cast<double>(num) / den; };
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < rep.per_statute.size(); ++i) {
    const auto& c = rep.per_statute[i];
    per.push_back({{"statute", i < statute_names.size() ? statute_names[i] : std::to_string(i)},
                   {"total", c.total},
                   {"nf_numerator", c.nf_numerator},
                   {"nf", ratio(c.nf_numerator, c.total)},
                   {"sf_numerator", c.sf_numerator},
                   {"sf", ratio(c.sf_numerator, c.total)}});
  }
  return {{"total", rep.overall.total},
          {"nf_numerator", rep.overall.nf_numerator},
          {"nf", rep.nf()},
          {"sf_numerator", rep.overall.sf_numerator},
          {"sf", rep.sf()},
          {"per_statute", per}};
}

// One JSON line per explanation: each distinct sentence once, with the lowest
// head that selected it and that head's weight.
inline nlohmann::ordered_json explanation_json(const Explanation& e, const std::string& statute_name,
                                               const std::vector<std::string>& sentences) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (int idx : e.sentence_indices) {
    const auto it = std::find_if(e.heads.begin(), e.heads.end(), [&](const HeadEvidence& h) { return h.sentence == idx; });
    list.push_back({{"index", idx},
                    {"text", idx < static_cast<int>(sentences.size()) ? sentences[static_cast<std::size_t>(idx)] : ""},
                    {"weight", it->weight},
                    {"head", it->head}});
  }
  return {{"case_id", e.case_id}, {"statute", statute_name}, {"sentences", list}};
}

}  // namespace lexaos
