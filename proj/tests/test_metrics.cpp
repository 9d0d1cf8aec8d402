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

#include <random>
#include <sstream>

#include "lexaos/metrics.hpp"
#include "oracle.hpp"

namespace {

using namespace lexaos;

TEST(Metrics, WorkedMicroExample) {
  const auto r = prf_from_counts(3, 1, 3);
  EXPECT_DOUBLE_EQ(r.precision, 0.75);
  EXPECT_DOUBLE_EQ(r.recall, 0.5);
  EXPECT_DOUBLE_EQ(r.f1, 0.6);
}

TEST(Metrics, ZeroOverZeroIsZero) {
  const auto r = prf_from_counts(0, 0, 0);
  EXPECT_EQ(r.precision, 0.0);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(r.f1, 0.0);
  LabelConfusion c(3);
  EXPECT_EQ(micro_prf(c).f1, 0.0);
  EXPECT_EQ(macro_prf(c).f1, 0.0);
}

TEST(Metrics, MacroAveragesOverAllLabels) {
  // Label 0 perfect, label 1 present in gold but never predicted.
  const auto c = confusion({{0}, {0}, {}}, {{0}, {0, 1}, {1}}, 2);
  EXPECT_DOUBLE_EQ(macro_prf(c).f1, 0.5);
  // Unseen label 2 still counts in the denominator.
  const auto c3 = confusion({{0}}, {{0}}, 3);
  EXPECT_DOUBLE_EQ(macro_prf(c3).f1, 1.0 / 3.0);
  const auto perfect = confusion({{0, 1}, {1}}, {{0, 1}, {1}}, 2);
  EXPECT_DOUBLE_EQ(macro_prf(perfect).precision, 1.0);
  EXPECT_DOUBLE_EQ(macro_prf(perfect).recall, 1.0);
  EXPECT_DOUBLE_EQ(macro_prf(perfect).f1, 1.0);
}

TEST(Metrics, JaccardExamples) {
  EXPECT_DOUBLE_EQ(jaccard({0, 1}, {1, 2}), 1.0 / 3.0);
  EXPECT_EQ(jaccard({}, {}), 1.0);
  EXPECT_EQ(jaccard({0}, {1}), 0.0);
  EXPECT_EQ(jaccard({}, {1}), 0.0);
  EXPECT_EQ(avg_jaccard(std::vector<LabelSet>{{1, 2}, {}}, std::vector<LabelSet>{{1, 2}, {}}), 1.0);
}

TEST(Metrics, AvgJaccardChecksAlignment) {
  std::vector<LabeledCase> p{{"a", {1}}, {"b", {2}}};
  std::vector<LabeledCase> g{{"a", {1}}, {"c", {2}}};
  EXPECT_THROW(avg_jaccard(p, g), UserError);
  g[1].case_id = "b";
  EXPECT_EQ(avg_jaccard(p, g), 1.0);
  g.pop_back();
  EXPECT_THROW(avg_jaccard(p, g), UserError);
}

LabelSet random_set(std::mt19937_64& rng, int n) {
  LabelSet s;
  std::bernoulli_distribution pick(std::uniform_real_distribution<double>(0.0, 0.6)(rng));
  for (int i = 0; i < n; ++i) {
    if (pick(rng)) s.push_back(i);
  }
  return s;
}

TEST(Metrics, MatchesNaiveOracleExactly) {
  std::mt19937_64 rng(1000);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    const int cases = std::uniform_int_distribution<int>(1, 20)(rng);
    std::vector<LabelSet> pred, gold;
    for (int k = 0; k < cases; ++k) {
      pred.push_back(random_set(rng, n));
      gold.push_back(random_set(rng, n));
    }
    const auto c = confusion(pred, gold, static_cast<std::size_t>(n));
    const auto mi = micro_prf(c);
    const auto ma = macro_prf(c);
    const auto omi = oracle::micro(pred, gold, n);
    const auto oma = oracle::macro(pred, gold, n);
    ASSERT_EQ(mi.precision, omi.p);
    ASSERT_EQ(mi.recall, omi.r);
    ASSERT_EQ(mi.f1, omi.f);
    ASSERT_EQ(ma.precision, oma.p);
    ASSERT_EQ(ma.recall, oma.r);
    ASSERT_EQ(ma.f1, oma.f);
    double js = 0.0;
    for (int k = 0; k < cases; ++k) js += oracle::jaccard(pred[static_cast<std::size_t>(k)], gold[static_cast<std::size_t>(k)]);
    ASSERT_EQ(avg_jaccard(pred, gold), js / cases);
  }
}

TEST(Metrics, AggregateEqualsSumOfLabels) {
  std::mt19937_64 rng(1001);
  std::vector<LabelSet> pred, gold;
  for (int k = 0; k < 50; ++k) {
    pred.push_back(random_set(rng, 6));
    gold.push_back(random_set(rng, 6));
  }
  const auto c = confusion(pred, gold, 6);
  std::int64_t tp = 0;
  for (auto v : c.tp) {
    EXPECT_GE(v, 0);
    tp += v;
  }
  EXPECT_EQ(c.total_tp(), tp);
}

TEST(Metrics, MicroF1InvariantUnderRelabeling) {
  std::mt19937_64 rng(1002);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 8;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<LabelSet> pred, gold, pp, pg;
    auto relabel = [&](const LabelSet& s) {
      LabelSet out;
      for (int v : s) out.push_back(perm[static_cast<std::size_t>(v)]);
      std::sort(out.begin(), out.end());
      return out;
    };
    for (int k = 0; k < 15; ++k) {
      pred.push_back(random_set(rng, n));
      gold.push_back(random_set(rng, n));
      pp.push_back(relabel(pred.back()));
      pg.push_back(relabel(gold.back()));
    }
    EXPECT_EQ(micro_prf(confusion(pred, gold, n)).f1, micro_prf(confusion(pp, pg, n)).f1);
  }
}

TEST(Metrics, MicroScoresCoincideWhenFpEqualsFn) {
  const auto c = confusion({{0, 1}, {2}}, {{0, 2}, {1}}, 3);
  ASSERT_EQ(c.total_fp(), c.total_fn());
  const auto r = micro_prf(c);
  EXPECT_DOUBLE_EQ(r.precision, r.recall);
  EXPECT_DOUBLE_EQ(r.recall, r.f1);
}

TEST(Metrics, AvgJaccardIsOneOnlyOnExactMatch) {
  std::mt19937_64 rng(1003);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<LabelSet> pred, gold;
    for (int k = 0; k < 5; ++k) {
      pred.push_back(random_set(rng, 4));
      gold.push_back(random_set(rng, 4));
    }
    const double j = avg_jaccard(pred, gold);
    EXPECT_LE(j, 1.0);
    EXPECT_EQ(j == 1.0, pred == gold);
  }
}

TEST(Metrics, ConfusableCounts) {
  MatrixF y(4, 2);
  y << 1, 0, 0.9f, 0.1f, 0, 1, -1, 0;
  const auto c = confusable_counts(y);
  EXPECT_EQ(c, (std::vector<int>{1, 1, 0, 0}));
  MatrixF orth = MatrixF::Identity(3, 3);
  EXPECT_EQ(confusable_counts(orth), (std::vector<int>{0, 0, 0}));
}

TEST(Metrics, PerStatuteReportAndOutputs) {
  const auto c = confusion({{0}, {0, 1}}, {{0}, {0}}, 3);
  MatrixF y = MatrixF::Identity(3, 3);
  const auto rows = per_statute_report(c, {"A", "B", "C"}, {10, 5, 0}, y);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].scores.f1, 1.0);
  EXPECT_EQ(rows[1].fp, 1);
  EXPECT_EQ(rows[2].scores.f1, 0.0);  // TP = FP = FN = 0
  EXPECT_EQ(rows[0].train_frequency, 10);
  const auto j = metrics_report_json(c, 0.75, rows);
  EXPECT_EQ(j["avg_jaccard"], 0.75);
  EXPECT_EQ(j["per_statute"].size(), 3u);
  EXPECT_TRUE(j.contains("micro") && j.contains("macro"));
  std::ostringstream os;
  write_per_statute_csv(os, rows);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "statute,precision,recall,f1,tp,fp,fn,train_frequency,confusable");
  EXPECT_NE(os.str().find("\"B\",0,0,0,0,1,0,5,0"), std::string::npos) << os.str();
  EXPECT_THROW(per_statute_report(c, {"A"}, {}), UserError);
}

}  // namespace
