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

// Statute registries and case descriptions: JSON-lines loading, validation,
// numeric masking and truncation.
//
// Statute file, one object per line, statute_id = line index:
//   {"name": "Section 465", "content": "Whoever commits forgery ..."}
// Case file, one object per line, labels are statute names:
//   {"case_id": "c1", "sentences": ["...", ...], "labels": ["Section 465"]}
//
// Lines carrying a "_provenance" key are metadata written by the CLI and are
// skipped by both loaders.

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "lexaos/common.hpp"

namespace lexaos {

inline constexpr char kMaskChar = '#';
inline constexpr int kDefaultMaxSentences = 150;

struct Statute {
  StatuteId statute_id = 0;
  std::string name;
  std::string content;

  bool operator==(const Statute&) const = default;
};

class StatuteRegistry {
 public:
  StatuteRegistry() = default;

  // Ids are assigned densely in insertion order.
  explicit StatuteRegistry(std::vector<Statute> statutes) {
    for (auto& s : statutes) add(std::move(s.name), std::move(s.content));
  }

  StatuteId add(std::string name, std::string content) {
    if (by_name_.contains(name)) throw UserError("duplicate statute name '" + name + "'");
    const auto id = static_cast<StatuteId>(statutes_.size());
    by_name_.emplace(name, id);
    statutes_.push_back({id, std::move(name), std::move(content)});
    return id;
  }

  std::size_t size() const { return statutes_.size(); }
  bool empty() const { return statutes_.empty(); }
  const Statute& operator[](StatuteId id) const { return statutes_.at(static_cast<std::size_t>(id)); }
  auto begin() const { return statutes_.begin(); }
  auto end() const { return statutes_.end(); }

  std::optional<StatuteId> find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  StatuteId id_of(std::string_view name) const {
    if (auto id = find(name)) return *id;
    throw UserError("unknown statute '" + std::string(name) + "'");
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& s : statutes_) out.push_back(s.name);
    return out;
  }

  bool operator==(const StatuteRegistry& o) const { return statutes_ == o.statutes_; }

 private:
  std::vector<Statute> statutes_;
  std::unordered_map<std::string, StatuteId> by_name_;
};

enum class Split { kTrain, kDev, kTest };

inline constexpr std::array<Split, 3> kAllSplits = {Split::kTrain, Split::kDev, Split::kTest};

inline std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "?";
}

inline Split parse_split(std::string_view s) {
  for (Split sp : kAllSplits) {
    if (split_name(sp) == s) return sp;
  }
  throw UserError("unknown split '" + std::string(s) + "'");
}

struct CaseDescription {
  std::string case_id;
  std::vector<std::string> sentences;
  LabelSet gold_labels;
  Split split = Split::kTrain;

  bool operator==(const CaseDescription&) const = default;
};

struct Dataset {
  StatuteRegistry registry;
  std::vector<CaseDescription> cases;

  std::vector<const CaseDescription*> split(Split s) const {
    std::vector<const CaseDescription*> out;
    for (const auto& c : cases) {
      if (c.split == s) out.push_back(&c);
    }
    return out;
  }

  std::map<std::string, std::size_t> split_sizes() const {
    std::map<std::string, std::size_t> out;
    for (Split s : kAllSplits) out[std::string(split_name(s))] = 0;
    for (const auto& c : cases) ++out[std::string(split_name(c.split))];
    return out;
  }

  bool operator==(const Dataset&) const = default;
};

inline std::string trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

// Replaces every ASCII decimal digit with kMaskChar, one for one.
inline std::string mask_numerics(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= '0' && c <= '9') c = kMaskChar;
  }
  return out;
}

inline bool contains_digit(std::string_view text) {
  return std::any_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline CaseDescription mask_case(CaseDescription c) {
  for (auto& s : c.sentences) s = mask_numerics(s);
  return c;
}

inline CaseDescription truncate_sentences(CaseDescription c, int max_sentences) {
  if (max_sentences < 1) throw UserError("max_sentences must be >= 1");
  if (c.sentences.size() > static_cast<std::size_t>(max_sentences)) {
    c.sentences.resize(static_cast<std::size_t>(max_sentences));
  }
  return c;
}

namespace detail {

// Calls fn(json, line_number) for every non-blank, non-provenance line.
template <typename Fn>
void for_each_json_line(std::istream& is, const std::string& source, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(source, line_no, "expected a JSON object");
    if (obj.contains("_provenance")) continue;
    fn(obj, line_no);
  }
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw UserError("cannot open " + path.string());
  return is;
}

}  // namespace detail

inline StatuteRegistry parse_statutes(std::istream& is, const std::string& source = "<statutes>") {
  StatuteRegistry registry;
  detail::for_each_json_line(is, source, [&](const nlohmann::json& obj, std::size_t line) {
    if (!obj.contains("name") || !obj["name"].is_string()) {
      throw ParseError(source, line, "missing string field 'name'");
    }
    if (!obj.contains("content") || !obj["content"].is_string()) {
      throw ParseError(source, line, "missing string field 'content'");
    }
    auto name = obj["name"].get<std::string>();
    auto content = obj["content"].get<std::string>();
    if (trim(content).empty()) throw ParseError(source, line, "empty content for statute '" + name + "'");
    try {
      registry.add(std::move(name), std::move(content));
    } catch (const UserError& e) {
      throw ParseError(source, line, e.what());
    }
  });
  if (registry.empty()) throw UserError(source + ": no statutes");
  return registry;
}

inline StatuteRegistry load_statutes(const std::filesystem::path& path) {
  auto is = detail::open_input(path);
  return parse_statutes(is, path.string());
}

// `split` overrides any "split" field in the file; without either the case
// is assigned to train.
inline std::vector<CaseDescription> parse_cases(std::istream& is, const StatuteRegistry& registry,
                                                std::optional<Split> split = std::nullopt,
                                                const std::string& source = "<cases>") {
  std::vector<CaseDescription> cases;
  detail::for_each_json_line(is, source, [&](const nlohmann::json& obj, std::size_t line) {
    CaseDescription c;
    try {
      c.case_id = obj.at("case_id").get<std::string>();
      c.sentences = obj.at("sentences").get<std::vector<std::string>>();
      std::set<StatuteId> labels;
      for (const auto& name : obj.value("labels", std::vector<std::string>{})) {
        auto id = registry.find(name);
        if (!id) throw ParseError(source, line, "unknown statute '" + name + "' in case " + c.case_id);
        labels.insert(*id);
      }
      c.gold_labels.assign(labels.begin(), labels.end());
      if (split) {
        c.split = *split;
      } else if (obj.contains("split")) {
        c.split = parse_split(obj["split"].get<std::string>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source, line, e.what());
    }
    if (c.sentences.empty()) throw ParseError(source, line, "case " + c.case_id + " has zero sentences");
    cases.push_back(std::move(c));
  });
  return cases;
}

inline std::vector<CaseDescription> load_cases(const std::filesystem::path& path, const StatuteRegistry& registry,
                                               std::optional<Split> split = std::nullopt) {
  auto is = detail::open_input(path);
  return parse_cases(is, registry, split, path.string());
}

inline void write_statutes(std::ostream& os, const StatuteRegistry& registry) {
  for (const auto& s : registry) {
    os << nlohmann::ordered_json{{"name", s.name}, {"content", s.content}}.dump() << '\n';
  }
}

inline nlohmann::ordered_json case_to_json(const CaseDescription& c, const StatuteRegistry& registry) {
  std::vector<std::string> labels;
  for (StatuteId id : c.gold_labels) labels.push_back(registry[id].name);
  return {{"case_id", c.case_id},
          {"sentences", c.sentences},
          {"labels", labels},
          {"split", std::string(split_name(c.split))}};
}

inline void write_cases(std::ostream& os, const std::vector<CaseDescription>& cases, const StatuteRegistry& registry) {
  for (const auto& c : cases) os << case_to_json(c, registry).dump() << '\n';
}

struct Manifest {
  std::map<Split, std::filesystem::path> paths;
  std::map<Split, std::size_t> counts;  // optional expected sizes
};

// {"train": path, "dev": path, "test": path, "counts": {"train": n, ...}};
// relative paths resolve against the manifest's directory.
inline Manifest load_manifest(const std::filesystem::path& path) {
  auto is = detail::open_input(path);
  Manifest m;
  try {
    const auto obj = nlohmann::json::parse(is);
    for (Split s : kAllSplits) {
      const std::string key(split_name(s));
      if (obj.contains(key)) {
        std::filesystem::path p = obj[key].get<std::string>();
        m.paths[s] = p.is_absolute() ? p : path.parent_path() / p;
      }
      if (obj.contains("counts") && obj["counts"].contains(key)) {
        m.counts[s] = obj["counts"][key].get<std::size_t>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw UserError(path.string() + ": bad manifest: " + e.what());
  }
  return m;
}

inline Dataset load_dataset(const std::filesystem::path& statutes_path, const Manifest& manifest) {
  Dataset ds;
  ds.registry = load_statutes(statutes_path);
  for (const auto& [split, p] : manifest.paths) {
    auto cases = load_cases(p, ds.registry, split);
    if (auto it = manifest.counts.find(split); it != manifest.counts.end() && it->second != cases.size()) {
      throw UserError(std::string(split_name(split)) + " split has " + std::to_string(cases.size()) +
                      " cases, manifest expects " + std::to_string(it->second));
    }
    for (auto& c : cases) ds.cases.push_back(std::move(c));
  }
  return ds;
}

// Masks then truncates every case; statutes are left untouched.
inline Dataset prepare_dataset(Dataset ds, int max_sentences = kDefaultMaxSentences) {
  for (auto& c : ds.cases) c = truncate_sentences(mask_case(std::move(c)), max_sentences);
  return ds;
}

}  // namespace lexaos
