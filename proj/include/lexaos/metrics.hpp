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

// Multi-label evaluation. Every 0/0 ratio is 0, except the Jaccard similarity
// of two empty sets, which is 1.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lexaos/common.hpp"

namespace lexaos {

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

inline Prf prf_from_counts(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  Prf r;
  r.precision = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fp));
  r.recall = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fn));
  r.f1 = safe_ratio(2.0 * r.precision * r.recall, r.precision + r.recall);
  return r;
}

struct LabelConfusion {
  std::vector<std::int64_t> tp, fp, fn;

  explicit LabelConfusion(std::size_t n = 0) : tp(n, 0), fp(n, 0), fn(n, 0) {}

  std::size_t size() const { return tp.size(); }

  // Both sets sorted and unique.
  void add(const LabelSet& predicted, const LabelSet& gold) {
    auto p = predicted.begin();
    auto g = gold.begin();
    while (p != predicted.end() || g != gold.end()) {
      if (g == gold.end() || (p != predicted.end() && *p < *g)) {
        ++fp.at(static_cast<std::size_t>(*p++));
      } else if (p == predicted.end() || *g < *p) {
        ++fn.at(static_cast<std::size_t>(*g++));
      } else {
        ++tp.at(static_cast<std::size_t>(*p));
        ++p;
        ++g;
      }
    }
  }

  std::int64_t total_tp() const { return sum(tp); }
  std::int64_t total_fp() const { return sum(fp); }
  std::int64_t total_fn() const { return sum(fn); }

 private:
  static std::int64_t sum(const std::vector<std::int64_t>& v) {
    std::int64_t s = 0;
    for (auto x : v) s += x;
    return s;
  }
};

inline LabelConfusion confusion(const std::vector<LabelSet>& predicted, const std::vector<LabelSet>& gold,
                                std::size_t num_labels) {
  if (predicted.size() != gold.size()) throw UserError("prediction and gold lists differ in length");
  LabelConfusion c(num_labels);
  for (std::size_t k = 0; k < predicted.size(); ++k) c.add(predicted[k], gold[k]);
  return c;
}

inline Prf micro_prf(const LabelConfusion& c) {
  return prf_from_counts(c.total_tp(), c.total_fp(), c.total_fn());
}

// Per-label scores averaged over every label, seen or not.
inline Prf macro_prf(const LabelConfusion& c) {
  Prf avg;
  if (c.size() == 0) return avg;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Prf r = prf_from_counts(c.tp[i], c.fp[i], c.fn[i]);
    avg.precision += r.precision;
    avg.recall += r.recall;
    avg.f1 += r.f1;
  }
  const double n = static_cast<double>(c.size());
  avg.precision /= n;
  avg.recall /= n;
  avg.f1 /= n;
  return avg;
}

inline double jaccard(const LabelSet& a, const LabelSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  LabelSet inter;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
  const double uni = static_cast<double>(a.size() + b.size() - inter.size());
  return static_cast<double>(inter.size()) / uni;
}

inline double avg_jaccard(const std::vector<LabelSet>& predicted, const std::vector<LabelSet>& gold) {
  if (predicted.size() != gold.size()) throw UserError("prediction and gold lists differ in length");
  if (predicted.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < predicted.size(); ++k) s += jaccard(predicted[k], gold[k]);
  return s / static_cast<double>(predicted.size());
}

struct LabeledCase {
  std::string case_id;
  LabelSet labels;
};

inline double avg_jaccard(const std::vector<LabeledCase>& predicted, const std::vector<LabeledCase>& gold) {
  if (predicted.size() != gold.size()) throw UserError("misaligned case ids: list lengths differ");
  std::vector<LabelSet> p, g;
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    if (predicted[k].case_id != gold[k].case_id) {
      throw UserError("misaligned case ids at position " + std::to_string(k) + ": '" + predicted[k].case_id +
                      "' vs '" + gold[k].case_id + "'");
    }
    p.push_back(predicted[k].labels);
    g.push_back(gold[k].labels);
  }
  return avg_jaccard(p, g);
}

struct StatuteReportRow {
  std::string statute;
  Prf scores;
  std::int64_t tp = 0, fp = 0, fn = 0;
  std::int64_t train_frequency = 0;
  int confusable = 0;  // other statutes with content cosine similarity >= threshold
};

inline constexpr double kConfusableCosine = 0.75;

// Number of other rows of `statutes` whose cosine similarity with each row is
// at least `threshold`.
inline std::vector<int> confusable_counts(const MatrixF& statutes, double threshold = kConfusableCosine) {
  const MatrixD m = statutes.cast<double>();
  VectorD norms = m.rowwise().norm();
  std::vector<int> out(static_cast<std::size_t>(m.rows()), 0);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.rows(); ++j) {
      const double den = norms(i) * norms(j);
      const double cos = den == 0.0 ? 0.0 : m.row(i).dot(m.row(j)) / den;
      if (cos >= threshold) {
        ++out[static_cast<std::size_t>(i)];
        ++out[static_cast<std::size_t>(j)];
      }
    }
  }
  return out;
}

// `statute_embeddings` may be empty, in which case the confusable column is 0.
inline std::vector<StatuteReportRow> per_statute_report(const LabelConfusion& c, const std::vector<std::string>& names,
                                                        const std::vector<std::int64_t>& train_counts,
                                                        const MatrixF& statute_embeddings = {},
                                                        double threshold = kConfusableCosine) {
  if (names.size() != c.size()) throw UserError("per_statute_report: name count does not match label count");
  std::vector<int> confusable(c.size(), 0);
  if (statute_embeddings.rows() > 0) {
    if (static_cast<std::size_t>(statute_embeddings.rows()) != c.size()) {
      throw ShapeError("per_statute_report: statute embedding rows do not match label count");
    }
    confusable = confusable_counts(statute_embeddings, threshold);
  }
  std::vector<StatuteReportRow> rows;
  for (std::size_t i = 0; i < c.size(); ++i) {
    StatuteReportRow r;
    r.statute = names[i];
    r.tp = c.tp[i];
    r.fp = c.fp[i];
    r.fn = c.fn[i];
    r.scores = prf_from_counts(r.tp, r.fp, r.fn);
    r.train_frequency = i < train_counts.size() ? train_counts[i] : 0;
    r.confusable = confusable[i];
    rows.push_back(r);
  }
  return rows;
}

inline nlohmann::ordered_json prf_json(const Prf& p) {
  return {{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
}

inline nlohmann::ordered_json metrics_report_json(const LabelConfusion& c, double avg_jacc,
                                                  const std::vector<StatuteReportRow>& rows) {
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    per.push_back({{"statute", r.statute},
                   {"precision", r.scores.precision},
                   {"recall", r.scores.recall},
                   {"f1", r.scores.f1},
                   {"tp", r.tp},
                   {"fp", r.fp},
                   {"fn", r.fn},
                   {"train_frequency", r.train_frequency},
                   {"confusable", r.confusable}});
  }
  return {{"micro", prf_json(micro_prf(c))},
          {"macro", prf_json(macro_prf(c))},
          {"avg_jaccard", avg_jacc},
          {"per_statute", per}};
}

inline void write_per_statute_csv(std::ostream& os, const std::vector<StatuteReportRow>& rows) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q.push_back('"');
      q.push_back(ch);
    }
    return q + "\"";
  };
  os << "statute,precision,recall,f1,tp,fp,fn,train_frequency,confusable\n";
  os << std::setprecision(6);
  for (const auto& r : rows) {
    os << quote(r.statute) << ',' << r.scores.precision << ',' << r.scores.recall << ',' << r.scores.f1 << ','
       << r.tp << ',' << r.fp << ',' << r.fn << ',' << r.train_frequency << ',' << r.confusable << '\n';
  }
}

}  // namespace lexaos
