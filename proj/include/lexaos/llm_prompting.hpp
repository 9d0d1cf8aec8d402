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

// Zero-shot statute prediction by prompting a chat LLM.
//
// For each case: summarise to at most 25 sentences, take the classifier's
// top-k statutes, send one prompt per (case, statute), and keep the statutes
// whose response says "Applicable: Yes".

#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "lexaos/http.hpp"
#include "json.hpp"
#include "lexaos/aos_model.hpp"
#include "lexaos/corpus.hpp"
#include "lexaos/metrics.hpp"
#include "lexaos/prompt_templates.hpp"
#include "lexaos/sha256.hpp"

namespace lexaos {

inline constexpr int kSummarySentences = 25;
inline constexpr int kDefaultTopK = 5;
inline constexpr int kSmallTopK = 3;  // for registries with few statutes

// ---------------------------------------------------------------------------
// Summarisation

struct CaseSummary {
  std::string case_id;
  std::vector<int> indices;  // strictly increasing
  std::string text;          // selected sentences joined by a space
};

// Centroid selection: score each sentence by cosine similarity to the mean
// sentence embedding, keep the best `max_sentences` (ties to the lower index)
// and emit them in document order.
template <typename Derived>
std::vector<int> centroid_select(const Eigen::MatrixBase<Derived>& x, int max_sentences = kSummarySentences) {
  const auto n = static_cast<int>(x.rows());
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  if (n <= max_sentences) return idx;
  const MatrixD m = x.template cast<double>();
  const VectorD centroid = m.colwise().mean().transpose();
  const double cn = centroid.norm();
  std::vector<double> score(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    const double den = m.row(j).norm() * cn;
    score[static_cast<std::size_t>(j)] = den == 0.0 ? 0.0 : m.row(j).dot(centroid) / den;
  }
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return score[static_cast<std::size_t>(a)] > score[static_cast<std::size_t>(b)];
  });
  idx.resize(static_cast<std::size_t>(max_sentences));
  std::sort(idx.begin(), idx.end());
  return idx;
}

template <typename Derived>
CaseSummary summarize_case(const CaseDescription& c, const Eigen::MatrixBase<Derived>& sentence_embeddings,
                           int max_sentences = kSummarySentences) {
  if (static_cast<std::size_t>(sentence_embeddings.rows()) != c.sentences.size()) {
    throw ShapeError("summarize_case: embedding rows do not match sentence count for case " + c.case_id);
  }
  CaseSummary s;
  s.case_id = c.case_id;
  s.indices = centroid_select(sentence_embeddings, max_sentences);
  for (int j : s.indices) {
    if (!s.text.empty()) s.text.push_back(' ');
    s.text += c.sentences[static_cast<std::size_t>(j)];
  }
  return s;
}

// ---------------------------------------------------------------------------
// Prompts and responses

enum class PromptMode { kStandard, kCot };

inline std::string_view mode_name(PromptMode m) { return m == PromptMode::kCot ? "cot" : "standard"; }

inline PromptMode parse_mode(std::string_view s) {
  if (s == "standard") return PromptMode::kStandard;
  if (s == "cot") return PromptMode::kCot;
  throw UserError("unknown prompt mode '" + std::string(s) + "' (expected standard or cot)");
}

inline std::string_view prompt_template(PromptMode m) {
  return m == PromptMode::kCot ? prompts::kCotV1 : prompts::kStandardV1;
}

struct PromptSpec {
  PromptMode mode = PromptMode::kStandard;
  StatuteId statute = 0;
  std::string summary;
  std::string text;
};

// Slot positions are located in the template, so statute or case text that
// happens to contain a slot marker is inserted verbatim.
inline PromptSpec build_prompt(const Statute& statute, const std::string& summary, PromptMode mode) {
  if (trim(statute.content).empty()) throw UserError("build_prompt: empty statute content");
  if (trim(summary).empty()) throw UserError("build_prompt: empty case summary");
  const std::string_view tpl = prompt_template(mode);
  const auto ps = tpl.find(prompts::kStatuteSlot);
  const auto pc = tpl.find(prompts::kCaseSlot);
  PromptSpec spec{mode, statute.statute_id, summary, {}};
  spec.text.reserve(tpl.size() + statute.content.size() + summary.size());
  spec.text.append(tpl.substr(0, ps));
  spec.text.append(statute.content);
  spec.text.append(tpl.substr(ps + prompts::kStatuteSlot.size(), pc - ps - prompts::kStatuteSlot.size()));
  spec.text.append(summary);
  spec.text.append(tpl.substr(pc + prompts::kCaseSlot.size()));
  return spec;
}

struct LlmVerdict {
  bool applicable = false;
  std::string explanation;
  std::optional<std::vector<std::string>> common_aspects;  // CoT only
  std::string raw;
  bool missing_verdict = false;
  bool missing_explanation = false;
};

namespace detail {

inline bool is_decoration(char c) { return c == '*' || c == '_' || c == '#' || c == '>' || c == '`'; }

inline std::string_view strip_decoration(std::string_view s) {
  auto drop = [](char c) { return is_decoration(c) || std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && drop(s.front())) s.remove_prefix(1);
  while (!s.empty() && drop(s.back())) s.remove_suffix(1);
  return s;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// If `line` is "<marker>: value" (case-insensitive, tolerant of markdown
// emphasis and a leading bullet), returns the value.
inline std::optional<std::string> marker_value(std::string_view line, std::string_view marker) {
  std::string_view s = strip_decoration(line);
  if (!s.empty() && s.front() == '-') s = strip_decoration(s.substr(1));
  if (s.size() < marker.size() || lower(s.substr(0, marker.size())) != marker) return std::nullopt;
  s.remove_prefix(marker.size());
  while (!s.empty() && (is_decoration(s.front()) || s.front() == ' ')) s.remove_prefix(1);
  if (s.empty() || s.front() != ':') return std::nullopt;
  s.remove_prefix(1);
  // Only emphasis is stripped around the value: '#' there is masked text.
  s = line.substr(static_cast<std::size_t>(s.data() - line.data()));
  auto emphasis = [](char c) {
    return c == '*' || c == '_' || c == '`' || std::isspace(static_cast<unsigned char>(c)) != 0;
  };
  while (!s.empty() && emphasis(s.front())) s.remove_prefix(1);
  while (!s.empty() && emphasis(s.back())) s.remove_suffix(1);
  return std::string(s);
}

inline std::optional<bool> yes_no(std::string_view value) {
  const std::string v = lower(value);
  auto word = [&](std::string_view w) {
    return v.starts_with(w) && (v.size() == w.size() || !std::isalpha(static_cast<unsigned char>(v[w.size()])));
  };
  if (word("yes")) return true;
  if (word("no")) return false;
  return std::nullopt;
}

inline std::vector<std::string> split_lines(std::string_view raw) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : raw) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(std::move(cur));
  return lines;
}

inline bool is_any_marker(std::string_view line) {
  return marker_value(line, "applicable") || marker_value(line, "explanation") ||
         marker_value(line, "common aspects");
}

// Comma/semicolon separated, ignoring separators inside parentheses.
inline std::vector<std::string> split_aspects(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  auto flush = [&] {
    std::string t = trim(cur);
    while (!t.empty() && (t.back() == '.' || t.back() == '*' || t.back() == '_' || t.back() == '`')) t.pop_back();
    t = trim(t);
    if (!t.empty()) out.push_back(t);
    cur.clear();
  };
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')' && depth > 0) --depth;
    if ((c == ',' || c == ';') && depth == 0) {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

}  // namespace detail

// Line-anchored, case-insensitive scan. The first "Applicable: Yes|No" line
// decides; a response without one is not-applicable with missing_verdict set.
inline LlmVerdict parse_response(const std::string& raw, PromptMode mode) {
  LlmVerdict v;
  v.raw = raw;
  const auto lines = detail::split_lines(raw);

  bool verdict_found = false;
  for (const auto& line : lines) {
    if (auto val = detail::marker_value(line, "applicable")) {
      if (auto yn = detail::yes_no(*val)) {
        v.applicable = *yn;
        verdict_found = true;
        break;
      }
    }
  }
  v.missing_verdict = !verdict_found;

  bool explanation_found = false;
  for (std::size_t k = 0; k < lines.size() && !explanation_found; ++k) {
    if (auto val = detail::marker_value(lines[k], "explanation")) {
      explanation_found = true;
      std::string text = *val;
      for (std::size_t m = k + 1; m < lines.size() && !detail::is_any_marker(lines[m]); ++m) {
        const std::string t = trim(lines[m]);
        if (t.empty()) continue;
        if (!text.empty()) text.push_back(' ');
        text += t;
      }
      v.explanation = trim(text);
    }
  }
  v.missing_explanation = v.explanation.empty();

  if (mode == PromptMode::kCot) {
    for (std::size_t k = 0; k < lines.size(); ++k) {
      auto val = detail::marker_value(lines[k], "common aspects");
      if (!val) continue;
      std::string text = *val;
      // Bulleted lists continue on the following lines.
      for (std::size_t m = k + 1; m < lines.size() && !detail::is_any_marker(lines[m]); ++m) {
        std::string t = trim(lines[m]);
        if (t.empty()) continue;
        if (t.front() == '-' || t.front() == '*') t = trim(t.substr(1));
        if (!text.empty()) text += ", ";
        text += t;
      }
      const std::string low = detail::lower(trim(text));
      if (low == "none" || low == "none.") {
        v.common_aspects = std::vector<std::string>{};
      } else {
        v.common_aspects = detail::split_aspects(text);
      }
      break;
    }
  }
  return v;
}

// Well-formed response text for a verdict, in the template's response format.
inline std::string render_response(bool applicable, const std::string& explanation, PromptMode mode,
                                   const std::vector<std::string>& common_aspects = {}) {
  std::string out;
  if (mode == PromptMode::kCot) {
    out += "Common Aspects: ";
    if (common_aspects.empty()) {
      out += "None";
    } else {
      for (std::size_t k = 0; k < common_aspects.size(); ++k) out += (k ? ", " : "") + common_aspects[k];
    }
    out += "\n";
  }
  out += std::string("Applicable: ") + (applicable ? "Yes" : "No") + "\n";
  out += "Explanation: " + explanation + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Clients

class TransportError : public Error {
 public:
  using Error::Error;
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual std::string complete(const std::string& prompt) = 0;
  virtual bool supports_concurrency() const { return false; }
};

struct RetryPolicy {
  int max_attempts = 3;
  int initial_backoff_ms = 500;
  double backoff_multiplier = 2.0;
};

struct LlmClientConfig {
  std::string endpoint;  // full URL of the chat-completions route
  std::string model;
  double temperature = 0.3;
  int max_tokens = 200;
  int max_in_flight = 4;
  RetryPolicy retry;
  int timeout_seconds = 120;
  std::string api_key;  // sent as a bearer token when non-empty

  void validate() const {
    if (temperature < 0.0) throw UserError("temperature must be >= 0");
    if (max_tokens < 1) throw UserError("max_tokens must be >= 1");
    if (max_in_flight < 1) throw UserError("max_in_flight must be >= 1");
    if (retry.max_attempts < 1) throw UserError("retry attempts must be >= 1");
  }
};

inline nlohmann::json chat_request_body(const LlmClientConfig& cfg, const std::string& prompt) {
  return {{"model", cfg.model},
          {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
          {"temperature", cfg.temperature},
          {"max_tokens", cfg.max_tokens}};
}

// POST {endpoint} with a chat-completions body; returns the first choice's
// message content. Failures are retried per the policy, then raised as
// TransportError.
class HttpLlmClient : public LlmClient {
 public:
  explicit HttpLlmClient(LlmClientConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    const auto scheme_end = cfg_.endpoint.find("://");
    if (scheme_end == std::string::npos) throw UserError("LLM endpoint must be an http(s) URL: " + cfg_.endpoint);
    const auto path_start = cfg_.endpoint.find('/', scheme_end + 3);
    origin_ = cfg_.endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : cfg_.endpoint.substr(path_start);
  }

  bool supports_concurrency() const override { return true; }

  std::string complete(const std::string& prompt) override {
    const std::string body = chat_request_body(cfg_, prompt).dump();
    std::string last_error;
    double backoff = cfg_.retry.initial_backoff_ms;
    for (int attempt = 1; attempt <= cfg_.retry.max_attempts; ++attempt) {
      if (attempt > 1) {
        std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<long>(backoff)));
        backoff *= cfg_.retry.backoff_multiplier;
      }
      httplib::Client client(origin_);
      client.set_read_timeout(cfg_.timeout_seconds, 0);
      client.set_connection_timeout(cfg_.timeout_seconds, 0);
      httplib::Headers headers;
      if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
      auto res = client.Post(path_, headers, body, "application/json");
      if (!res) {
        last_error = "transport: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      try {
        return nlohmann::json::parse(res->body).at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        last_error = std::string("malformed reply: ") + e.what();
      }
    }
    throw TransportError("LLM request to " + cfg_.endpoint + " failed after " +
                         std::to_string(cfg_.retry.max_attempts) + " attempts: " + last_error);
  }

 private:
  LlmClientConfig cfg_;
  std::string origin_;
  std::string path_;
};

inline std::string prompt_key(const std::string& prompt) { return sha256_hex(prompt); }

// Fixture: JSON lines {"prompt_sha256": hex, "response": raw}.
inline std::unordered_map<std::string, std::string> load_fixture(const std::filesystem::path& path) {
  std::unordered_map<std::string, std::string> out;
  std::ifstream is(path);
  if (!is) throw UserError("cannot open replay fixture " + path.string());
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (trim(line).empty()) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      out[obj.at("prompt_sha256").get<std::string>()] = obj.at("response").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), n, e.what());
    }
  }
  return out;
}

class ReplayClient : public LlmClient {
 public:
  explicit ReplayClient(std::unordered_map<std::string, std::string> responses) : responses_(std::move(responses)) {}
  explicit ReplayClient(const std::filesystem::path& fixture) : responses_(load_fixture(fixture)) {}

  bool supports_concurrency() const override { return true; }

  std::string complete(const std::string& prompt) override {
    auto it = responses_.find(prompt_key(prompt));
    if (it == responses_.end()) throw TransportError("no recorded response for prompt " + prompt_key(prompt));
    return it->second;
  }

 private:
  std::unordered_map<std::string, std::string> responses_;
};

// Forwards to `inner` and appends every exchange to a fixture file.
class RecordingClient : public LlmClient {
 public:
  RecordingClient(LlmClient& inner, const std::filesystem::path& fixture)
      : inner_(inner), out_(fixture, std::ios::app) {
    if (!out_) throw UserError("cannot open fixture " + fixture.string() + " for writing");
  }

  bool supports_concurrency() const override { return inner_.supports_concurrency(); }

  std::string complete(const std::string& prompt) override {
    std::string raw = inner_.complete(prompt);
    std::lock_guard lock(mu_);
    out_ << nlohmann::json{{"prompt_sha256", prompt_key(prompt)}, {"response", raw}}.dump() << '\n';
    out_.flush();
    return raw;
  }

 private:
  LlmClient& inner_;
  std::ofstream out_;
  std::mutex mu_;
};

class FunctionClient : public LlmClient {
 public:
  explicit FunctionClient(std::function<std::string(const std::string&)> fn) : fn_(std::move(fn)) {}
  std::string complete(const std::string& prompt) override { return fn_(prompt); }

 private:
  std::function<std::string(const std::string&)> fn_;
};

// ---------------------------------------------------------------------------
// Pipeline

struct PipelineOptions {
  int k = kDefaultTopK;
  PromptMode mode = PromptMode::kStandard;
  int summary_sentences = kSummarySentences;
  int max_in_flight = 4;
};

struct PairOutcome {
  std::size_t case_index = 0;
  StatuteId statute = 0;
  int rank = 0;  // position in the classifier's top-k
  LlmVerdict verdict;
  std::string raw_sha;
  bool errored = false;
  std::string error;
};

struct PipelineResult {
  std::vector<CaseSummary> summaries;
  std::vector<PairOutcome> pairs;           // ordered by (case, rank)
  std::vector<LabeledCase> predicted;       // per case, statutes judged applicable
  std::vector<std::string> errored_cases;   // cases with at least one errored pair
  std::vector<std::string> warnings;        // unparseable responses

  std::size_t errored_pairs() const {
    return static_cast<std::size_t>(std::count_if(pairs.begin(), pairs.end(), [](const auto& p) { return p.errored; }));
  }
};

// `cases[k]` and `embedded[k]` describe the same case. Case text is masked
// before summarising; responses are joined by (case, statute), so completion
// order never affects the result.
inline PipelineResult run_pipeline(std::span<const CaseDescription> cases,
                                   std::span<const EmbeddedCase<double>> embedded, const AosParameters<double>& params,
                                   const ModelConfig& cfg, const MatrixD& statute_embeddings,
                                   const StatuteRegistry& registry, LlmClient& client, const PipelineOptions& opt) {
  if (cases.size() != embedded.size()) throw UserError("run_pipeline: case and embedding lists differ in length");
  PipelineResult res;
  std::vector<PromptSpec> prompts;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    if (cases[c].case_id != embedded[c].case_id) throw UserError("run_pipeline: misaligned case ids");
    const CaseDescription masked = mask_case(cases[c]);
    res.summaries.push_back(summarize_case(masked, embedded[c].sentences, opt.summary_sentences));
    const auto ranked = top_k(params, cfg, embedded[c].sentences, statute_embeddings, opt.k);
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      PairOutcome p;
      p.case_index = c;
      p.statute = ranked[r].statute;
      p.rank = static_cast<int>(r);
      res.pairs.push_back(std::move(p));
      prompts.push_back(build_prompt(registry[ranked[r].statute], res.summaries.back().text, opt.mode));
    }
  }

  auto run_one = [&](std::size_t k) {
    auto& p = res.pairs[k];
    try {
      const std::string raw = client.complete(prompts[k].text);
      p.raw_sha = sha256_hex(raw);
      p.verdict = parse_response(raw, opt.mode);
    } catch (const TransportError& e) {
      p.errored = true;
      p.error = e.what();
    }
  };
  const std::size_t width =
      client.supports_concurrency() ? static_cast<std::size_t>(std::max(1, opt.max_in_flight)) : 1;
  for (std::size_t lo = 0; lo < res.pairs.size(); lo += width) {
    const std::size_t hi = std::min(res.pairs.size(), lo + width);
    if (width == 1) {
      run_one(lo);
      continue;
    }
    std::vector<std::future<void>> inflight;
    for (std::size_t k = lo; k < hi; ++k) inflight.push_back(std::async(std::launch::async, run_one, k));
    for (auto& f : inflight) f.get();
  }

  for (std::size_t c = 0; c < cases.size(); ++c) res.predicted.push_back({cases[c].case_id, {}});
  std::vector<char> errored(cases.size(), 0);
  for (const auto& p : res.pairs) {
    const auto& id = cases[p.case_index].case_id;
    if (p.errored) {
      errored[p.case_index] = 1;
      continue;
    }
    if (p.verdict.missing_verdict) {
      res.warnings.push_back("case " + id + ", statute " + registry[p.statute].name +
                             ": no Applicable line, treated as not applicable");
    } else if (p.verdict.missing_explanation) {
      res.warnings.push_back("case " + id + ", statute " + registry[p.statute].name + ": no explanation");
    }
    if (p.verdict.applicable) res.predicted[p.case_index].labels.push_back(p.statute);
  }
  for (std::size_t c = 0; c < cases.size(); ++c) {
    std::sort(res.predicted[c].labels.begin(), res.predicted[c].labels.end());
    if (errored[c]) res.errored_cases.push_back(cases[c].case_id);
  }
  return res;
}

inline nlohmann::ordered_json pair_outcome_json(const PairOutcome& p, const std::string& case_id,
                                                const std::string& statute_name, PromptMode mode) {
  nlohmann::ordered_json j{{"case_id", case_id}, {"statute", statute_name}, {"mode", std::string(mode_name(mode))}};
  if (p.errored) {
    j["applicable"] = nullptr;
    j["explanation"] = nullptr;
    j["common_aspects"] = nullptr;
    j["raw_sha"] = nullptr;
    j["error"] = p.error;
    return j;
  }
  j["applicable"] = p.verdict.applicable;
  j["explanation"] = p.verdict.explanation;
  j["common_aspects"] = p.verdict.common_aspects ? nlohmann::ordered_json(*p.verdict.common_aspects) : nullptr;
  j["raw_sha"] = p.raw_sha;
  return j;
}

}  // namespace lexaos
