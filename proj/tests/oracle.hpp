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

// Reference implementations used only by tests. Deliberately naive: explicit
// loops, keys materialised per sentence, no Eigen expressions, no shared code
// with the library beyond reading parameter entries.

#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "lexaos/aos_model.hpp"

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

struct Result {
  std::vector<Mat> alpha;  // [i][h][j]
  Mat probs;               // [i][class]
  double loss = 0.0;
};

inline Vec matvec(const lexaos::MatrixD& w, const Vec& x) {
  Vec out(static_cast<std::size_t>(w.rows()), 0.0);
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < w.cols(); ++c) s += w(r, c) * x[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = s;
  }
  return out;
}

inline Vec row(const lexaos::MatrixD& m, Eigen::Index r) {
  Vec out;
  for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

inline Vec softmax(const Vec& a) {
  double mx = a[0];
  for (double v : a) mx = std::max(mx, v);
  Vec e;
  double z = 0.0;
  for (double v : a) {
    e.push_back(std::exp(v - mx));
    z += e.back();
  }
  for (double& v : e) v /= z;
  return e;
}

inline Result forward(const lexaos::AosParameters<double>& p, const lexaos::ModelConfig& cfg,
                      const lexaos::MatrixD& x, const lexaos::MatrixD& y, const lexaos::LabelSet& gold) {
  Result r;
  const auto n_sent = static_cast<std::size_t>(x.rows());
  for (int i = 0; i < cfg.num_statutes; ++i) {
    Mat alpha_i;
    Vec concat;
    for (int h = 0; h < cfg.heads; ++h) {
      const auto k = static_cast<std::size_t>(i * cfg.heads + h);
      Vec q = matvec(p.w_q[k], row(y, i));
      for (std::size_t d = 0; d < q.size(); ++d) q[d] += p.b_q[k](static_cast<Eigen::Index>(d));
      Vec a;
      for (std::size_t j = 0; j < n_sent; ++j) {
        Vec key = matvec(p.w_k[k], row(x, static_cast<Eigen::Index>(j)));
        double dot = 0.0;
        for (std::size_t d = 0; d < key.size(); ++d) dot += (key[d] + p.b_k[k](static_cast<Eigen::Index>(d))) * q[d];
        a.push_back(dot / std::sqrt(static_cast<double>(cfg.attention_dim)));
      }
      Vec al = softmax(a);
      for (Eigen::Index d = 0; d < x.cols(); ++d) {
        double c = 0.0;
        for (std::size_t j = 0; j < n_sent; ++j) c += al[j] * x(static_cast<Eigen::Index>(j), d);
        concat.push_back(c);
      }
      alpha_i.push_back(al);
    }
    Vec hid = matvec(p.w_h, concat);
    for (std::size_t d = 0; d < hid.size(); ++d) hid[d] = std::max(0.0, hid[d] + p.b_h(static_cast<Eigen::Index>(d)));
    Vec z = matvec(p.w_o[static_cast<std::size_t>(i)], hid);
    z[0] += p.b_o[static_cast<std::size_t>(i)](0);
    z[1] += p.b_o[static_cast<std::size_t>(i)](1);
    Vec pr = softmax(z);
    const bool pos = std::find(gold.begin(), gold.end(), i) != gold.end();
    const double w = pos ? cfg.positive_weight : cfg.negative_weight;
    r.loss += -w * std::log(std::max(pos ? pr[1] : pr[0], 1e-12));
    r.alpha.push_back(alpha_i);
    r.probs.push_back(pr);
  }
  return r;
}

// Metrics by brute force over (case, label) membership.
struct Prf {
  double p, r, f;
};

inline double ratio(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

inline Prf prf(double tp, double fp, double fn) {
  const double p = ratio(tp, tp + fp);
  const double r = ratio(tp, tp + fn);
  return {p, r, ratio(2 * p * r, p + r)};
}

inline bool has(const std::vector<int>& s, int v) { return std::find(s.begin(), s.end(), v) != s.end(); }

inline Prf micro(const std::vector<std::vector<int>>& pred, const std::vector<std::vector<int>>& gold, int n) {
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t c = 0; c < pred.size(); ++c) {
    for (int l = 0; l < n; ++l) {
      const bool a = has(pred[c], l), b = has(gold[c], l);
      tp += a && b;
      fp += a && !b;
      fn += !a && b;
    }
  }
  return prf(tp, fp, fn);
}

inline Prf macro(const std::vector<std::vector<int>>& pred, const std::vector<std::vector<int>>& gold, int n) {
  Prf sum{0, 0, 0};
  for (int l = 0; l < n; ++l) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t c = 0; c < pred.size(); ++c) {
      const bool a = has(pred[c], l), b = has(gold[c], l);
      tp += a && b;
      fp += a && !b;
      fn += !a && b;
    }
    const Prf x = prf(tp, fp, fn);
    sum.p += x.p;
    sum.r += x.r;
    sum.f += x.f;
  }
  return {sum.p / n, sum.r / n, sum.f / n};
}

inline double jaccard(const std::vector<int>& a, const std::vector<int>& b) {
  std::set<int> u(a.begin(), a.end()), i;
  u.insert(b.begin(), b.end());
  for (int v : a) {
    if (has(b, v)) i.insert(v);
  }
  return u.empty() ? 1.0 : static_cast<double>(i.size()) / static_cast<double>(u.size());
}

}  // namespace oracle
