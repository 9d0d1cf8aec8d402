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

// Keyword corpus for end-to-end checks. Each statute is defined by one
// keyword; a case's gold labels are exactly the statutes whose keyword occurs
// in it, and each such keyword occurs in exactly one sentence. Filler
// sentences draw from a vocabulary disjoint from the keywords and sometimes
// cite "Section <n>" so that digit masking has something to remove.

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "lexaos/corpus.hpp"
#include "lexaos/aos_model.hpp"
#include "lexaos/embeddings.hpp"
#include "lexaos/trainer.hpp"

namespace lexaos {

inline constexpr std::array<std::string_view, 24> kSyntheticKeywords = {
    "arson",     "forgery",    "bribery",     "trespass",  "perjury",      "smuggling",
    "extortion", "kidnapping", "poaching",    "counterfeiting", "embezzlement", "vandalism",
    "burglary",  "piracy",     "espionage",   "fraud",     "blackmail",    "sedition",
    "stalking",  "rioting",    "defamation",  "usury",     "larceny",      "cheating"};

inline constexpr std::array<std::string_view, 96> kSyntheticFiller = {
    "the",       "applicant", "court",     "held",      "that",     "police",    "officer",  "village",
    "house",     "morning",   "evening",   "witness",   "stated",   "brother",   "wife",     "husband",
    "neighbour", "went",      "came",      "saw",       "told",     "reported",  "station",  "complaint",
    "lodged",    "against",   "accused",   "appeal",    "judge",    "trial",     "district", "high",
    "evidence",  "record",    "document",  "money",     "land",     "field",     "road",     "market",
    "shop",      "vehicle",   "night",     "day",       "month",    "year",      "family",   "member",
    "doctor",    "hospital",  "injury",    "found",     "present",  "absent",    "called",   "asked",
    "refused",   "agreed",    "paid",      "received",  "returned", "left",      "arrived",  "meeting",
    "dispute",   "property",  "sale",      "deed",      "letter",   "notice",    "hearing",  "counsel",
    "argued",    "submitted", "order",     "decree",    "petition", "filed",     "learned",  "bench",
    "prosecution", "defence", "statement", "recorded",  "inquiry",  "report",    "matter",   "relevant",
    "facts",     "respondent", "claimed",  "denied",    "during",   "after",     "before",   "later"};

struct SyntheticOptions {
  int statutes = 12;
  int train = 600;
  int dev = 100;
  int test = 100;
  int min_sentences = 10;
  int max_sentences = 40;
  int max_labels = 3;
  int min_words = 2;  // filler words per sentence
  int max_words = 5;
  int filler_vocabulary = 16;  // leading words of kSyntheticFiller in use
  double citation_rate = 0.1;  // chance a filler sentence cites a section number
  std::uint64_t seed = 2024;
};

struct SyntheticCorpus {
  Dataset dataset;
  std::vector<std::string> keywords;  // keywords[i] defines statute i
};

inline bool sentence_mentions(std::string_view sentence, std::string_view keyword) {
  for (const auto& tok : HashingEmbedder::tokenize(sentence)) {
    if (tok == keyword) return true;
  }
  return false;
}

inline SyntheticCorpus make_synthetic_corpus(const SyntheticOptions& opt = {}) {
  if (opt.statutes < 1 || opt.statutes > static_cast<int>(kSyntheticKeywords.size())) {
    throw UserError("synthetic corpus supports 1.." + std::to_string(kSyntheticKeywords.size()) + " statutes");
  }
  if (opt.filler_vocabulary < 1 || opt.filler_vocabulary > static_cast<int>(kSyntheticFiller.size())) {
    throw UserError("synthetic corpus supports 1.." + std::to_string(kSyntheticFiller.size()) + " filler words");
  }
  if (opt.min_words < 1 || opt.max_words < opt.min_words) throw UserError("synthetic corpus: bad sentence length range");
  if (opt.min_sentences < opt.max_labels || opt.max_sentences < opt.min_sentences || opt.max_labels < 1) {
    throw UserError("synthetic corpus: need max_sentences >= min_sentences >= max_labels >= 1");
  }
  std::mt19937_64 rng(opt.seed);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::bernoulli_distribution cite(opt.citation_rate);

  SyntheticCorpus out;
  for (int i = 0; i < opt.statutes; ++i) {
    const std::string kw(kSyntheticKeywords[static_cast<std::size_t>(i)]);
    out.keywords.push_back(kw);
    out.dataset.registry.add("Section " + std::to_string(101 + i),
                             "Whoever commits " + kw + ", or abets " + kw + ", shall be punished.");
  }

  auto filler_sentence = [&](int words) {
    std::string s;
    for (int w = 0; w < words; ++w) {
      if (!s.empty()) s.push_back(' ');
      s += kSyntheticFiller[static_cast<std::size_t>(uniform(0, opt.filler_vocabulary - 1))];
    }
    if (cite(rng)) s += " under Section " + std::to_string(uniform(1, 600)) + " on " + std::to_string(uniform(1, 28));
    s.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(s.front())));
    return s + ".";
  };

  auto make_case = [&](const std::string& id, Split split) {
    CaseDescription c;
    c.case_id = id;
    c.split = split;
    const int n = uniform(opt.min_sentences, opt.max_sentences);
    for (int j = 0; j < n; ++j) c.sentences.push_back(filler_sentence(uniform(opt.min_words, opt.max_words)));

    std::vector<int> statutes(static_cast<std::size_t>(opt.statutes));
    std::iota(statutes.begin(), statutes.end(), 0);
    std::shuffle(statutes.begin(), statutes.end(), rng);
    statutes.resize(static_cast<std::size_t>(uniform(1, std::min(opt.max_labels, opt.statutes))));

    std::vector<int> slots(static_cast<std::size_t>(n));
    std::iota(slots.begin(), slots.end(), 0);
    std::shuffle(slots.begin(), slots.end(), rng);
    for (std::size_t k = 0; k < statutes.size(); ++k) {
      auto& s = c.sentences[static_cast<std::size_t>(slots[k])];
      // Insert the keyword before a random word boundary.
      std::vector<std::size_t> cuts{0};
      for (std::size_t p = 0; p < s.size(); ++p) {
        if (s[p] == ' ') cuts.push_back(p + 1);
      }
      const std::size_t at = cuts[static_cast<std::size_t>(uniform(0, static_cast<int>(cuts.size()) - 1))];
      s.insert(at, out.keywords[static_cast<std::size_t>(statutes[k])] + " ");
      c.gold_labels.push_back(statutes[k]);
    }
    std::sort(c.gold_labels.begin(), c.gold_labels.end());
    out.dataset.cases.push_back(std::move(c));
  };

  for (int k = 0; k < opt.train; ++k) make_case("train-" + std::to_string(k), Split::kTrain);
  for (int k = 0; k < opt.dev; ++k) make_case("dev-" + std::to_string(k), Split::kDev);
  for (int k = 0; k < opt.test; ++k) make_case("test-" + std::to_string(k), Split::kTest);
  return out;
}

// Toy dimensions and optimiser settings used for the synthetic end-to-end run.
inline constexpr int kSyntheticInputDim = 32;

inline ModelConfig synthetic_model_config(int num_statutes) {
  ModelConfig cfg;
  cfg.num_statutes = num_statutes;
  cfg.heads = 3;
  cfg.input_dim = kSyntheticInputDim;
  cfg.attention_dim = 16;
  cfg.hidden_dim = 128;
  cfg.dropout = 0.1;
  return cfg;
}

inline TrainerOptions synthetic_trainer_options(std::uint64_t seed = 1) {
  TrainerOptions opt;
  opt.learning_rate = 5e-3;
  opt.batch_size = 8;
  opt.epochs = 30;
  opt.patience = 5;
  opt.seed = seed;
  return opt;
}

}  // namespace lexaos
