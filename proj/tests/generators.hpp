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

// Hand-rolled random generators for property tests.

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lexaos/aos_model.hpp"

namespace gen {

struct Instance {
  lexaos::ModelConfig cfg;
  lexaos::AosParameters<double> params;
  lexaos::MatrixD x;
  lexaos::MatrixD y;
  lexaos::LabelSet gold;
};

inline lexaos::MatrixD uniform_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  lexaos::MatrixD m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = u(rng);
  return m;
}

// Random parameters, including non-zero biases so every tensor is exercised.
inline lexaos::AosParameters<double> random_params(std::mt19937_64& rng, const lexaos::ModelConfig& cfg,
                                                   double scale = 1.0) {
  auto p = lexaos::AosParameters<double>::zeros(cfg);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (auto& t : p.tensors(cfg.heads)) {
    for (auto& v : t.values) v = u(rng);
  }
  return p;
}

inline lexaos::LabelSet random_labels(std::mt19937_64& rng, int n) {
  lexaos::LabelSet s;
  std::bernoulli_distribution pick(0.4);
  for (int i = 0; i < n; ++i) {
    if (pick(rng)) s.push_back(i);
  }
  return s;
}

inline Instance random_instance(std::mt19937_64& rng, int n, int heads, int d_in, int d_attn, int d_hidden,
                                int max_sentences) {
  Instance in;
  in.cfg.num_statutes = n;
  in.cfg.heads = heads;
  in.cfg.input_dim = d_in;
  in.cfg.attention_dim = d_attn;
  in.cfg.hidden_dim = d_hidden;
  in.cfg.dropout = 0.0;
  in.params = random_params(rng, in.cfg);
  const int sentences = std::uniform_int_distribution<int>(1, max_sentences)(rng);
  in.x = uniform_matrix(rng, sentences, d_in);
  in.y = uniform_matrix(rng, n, d_in);
  in.gold = random_labels(rng, n);
  return in;
}

inline std::string random_string(std::mt19937_64& rng, std::size_t max_len) {
  static const std::string alphabet = "abcXYZ 0123456789#.,-()\t";
  std::string s(std::uniform_int_distribution<std::size_t>(0, max_len)(rng), ' ');
  for (auto& ch : s) ch = alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
  return s;
}

}  // namespace gen
