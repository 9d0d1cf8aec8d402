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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include "generators.hpp"
#include "lexaos/checkpoint.hpp"

namespace {

using namespace lexaos;
namespace fs = std::filesystem;

TEST(Checkpoint, RoundTripsAtFloatPrecision) {
  const auto path = fs::temp_directory_path() / ("lexaos_ckpt_" + std::to_string(::getpid()) + ".ckpt");
  std::mt19937_64 rng(3);
  Checkpoint ck;
  ck.config.num_statutes = 3;
  ck.config.heads = 2;
  ck.config.input_dim = 5;
  ck.config.attention_dim = 4;
  ck.config.hidden_dim = 6;
  ck.params = gen::random_params(rng, ck.config);
  ck.statute_embeddings = gen::uniform_matrix(rng, 3, 5).cast<float>();
  ck.statute_names = {"A", "B", "C"};
  ck.meta = {{"seed", 9}, {"epoch", 4}};
  save_checkpoint(path, ck);

  const auto back = load_checkpoint(path);
  EXPECT_EQ(back.config, ck.config);
  EXPECT_EQ(back.statute_names, ck.statute_names);
  EXPECT_EQ(back.statute_embeddings, ck.statute_embeddings);
  EXPECT_EQ(back.meta["seed"], 9);
  const auto a = ck.params.tensors(2);
  const auto b = back.params.tensors(2);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t t = 0; t < a.size(); ++t) {
    EXPECT_EQ(a[t].name, b[t].name);
    for (std::size_t k = 0; k < a[t].values.size(); ++k) {
      EXPECT_EQ(static_cast<float>(a[t].values[k]), b[t].values[k]);
    }
  }
  // Saving what was loaded is a fixed point.
  save_checkpoint(path, back);
  EXPECT_TRUE(load_checkpoint(path).params == back.params);
  fs::remove(path);
}

TEST(Checkpoint, RejectsForeignFiles) {
  const auto path = fs::temp_directory_path() / ("lexaos_notckpt_" + std::to_string(::getpid()));
  std::ofstream(path) << "hello";
  EXPECT_THROW(load_checkpoint(path), UserError);
  EXPECT_THROW(load_checkpoint(path.string() + ".missing"), UserError);
  fs::remove(path);
}

}  // namespace
