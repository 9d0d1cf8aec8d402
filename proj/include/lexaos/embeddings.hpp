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

// Sentence and statute embeddings behind a provider interface, with a
// content-addressed disk cache so the numeric core never talks to an encoder.

#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexaos/http.hpp"
#include "json.hpp"
#include "lexaos/common.hpp"
#include "lexaos/corpus.hpp"
#include "lexaos/matrix_io.hpp"
#include "lexaos/sha256.hpp"

namespace lexaos {

inline constexpr std::size_t kDefaultEmbeddingDim = 768;

class ProviderUnavailable : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

using EmbeddingVector = std::vector<float>;

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dim() const = 0;
  // Cache key namespace; two providers with the same identity must agree on
  // every vector.
  virtual std::string identity() const = 0;
  virtual bool supports_concurrency() const { return false; }
  // One vector per text, in order. Dimensions are validated by the caller.
  virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) = 0;
};

// Bag-of-tokens embedder: each lower-cased alphanumeric token maps to a
// pseudo-random vector seeded by its FNV-1a hash; a text is the L2-normalised
// sum of its token vectors. Deterministic across runs and platforms.
class HashingEmbedder : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dim = kDefaultEmbeddingDim, std::uint64_t salt = 0) : dim_(dim), salt_(salt) {
    if (dim_ == 0) throw UserError("hashing embedder dimension must be >= 1");
  }

  std::size_t dim() const override { return dim_; }
  std::string identity() const override {
    return "hashing-v1:" + std::to_string(dim_) + ":" + std::to_string(salt_);
  }
  bool supports_concurrency() const override { return true; }

  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_one(t));
    return out;
  }

  static std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : text) {
      const auto c = static_cast<unsigned char>(ch);
      if (std::isalnum(c) || c >= 0x80 || ch == kMaskChar) {
        cur.push_back(static_cast<char>(std::tolower(c)));
      } else if (!cur.empty()) {
        tokens.push_back(std::move(cur));
        cur.clear();
      }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
  }

 private:
  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
    return h;
  }

  static std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  EmbeddingVector embed_one(std::string_view text) const {
    std::vector<double> acc(dim_, 0.0);
    for (const auto& tok : tokenize(text)) {
      std::uint64_t state = fnv1a(tok) ^ salt_;
      for (std::size_t d = 0; d < dim_; ++d) {
        // uniform in [-1, 1)
        acc[d] += static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
      }
    }
    double norm = 0.0;
    for (double v : acc) norm += v * v;
    norm = std::sqrt(norm);
    EmbeddingVector out(dim_, 0.0f);
    if (norm > 0.0) {
      for (std::size_t d = 0; d < dim_; ++d) out[d] = static_cast<float>(acc[d] / norm);
    }
    return out;
  }

  std::size_t dim_;
  std::uint64_t salt_;
};

// Serves vectors from a matrix file whose sidecar index names the SHA-256 of
// each row's text.
class PrecomputedProvider : public EmbeddingProvider {
 public:
  explicit PrecomputedProvider(const std::filesystem::path& matrix_path)
      : matrix_(read_matrix_file(matrix_path)) {
    const auto hashes = read_row_index(matrix_path);
    if (hashes.size() != static_cast<std::size_t>(matrix_.rows())) {
      throw UserError(matrix_path.string() + ": sidecar index must list one hash per row");
    }
    Sha256 id;
    for (std::size_t r = 0; r < hashes.size(); ++r) {
      row_of_.emplace(hashes[r], static_cast<Eigen::Index>(r));
      id.update(hashes[r]);
    }
    identity_ = "precomputed:" + std::to_string(matrix_.cols()) + ":" + id.hex();
  }

  std::size_t dim() const override { return static_cast<std::size_t>(matrix_.cols()); }
  std::string identity() const override { return identity_; }
  bool supports_concurrency() const override { return true; }

  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
      auto it = row_of_.find(sha256_hex(t));
      if (it == row_of_.end()) throw ProviderUnavailable("precomputed provider has no vector for text: " + t.substr(0, 60));
      const auto row = matrix_.row(it->second);
      out.emplace_back(row.data(), row.data() + row.size());
    }
    return out;
  }

 private:
  MatrixF matrix_;
  std::unordered_map<std::string, Eigen::Index> row_of_;
  std::string identity_;
};

// Client for a sidecar encoder:
//   POST /embed {"texts": [...]} -> {"dim": D, "vectors": [[...], ...]}
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string base_url, std::size_t declared_dim, std::string model_name = "remote",
                        int timeout_seconds = 60)
      : base_url_(std::move(base_url)),
        dim_(declared_dim),
        model_name_(std::move(model_name)),
        timeout_seconds_(timeout_seconds) {}

  std::size_t dim() const override { return dim_; }
  std::string identity() const override { return "http:" + model_name_ + ":" + std::to_string(dim_); }
  bool supports_concurrency() const override { return true; }

  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override {
    httplib::Client client(base_url_);
    client.set_read_timeout(timeout_seconds_, 0);
    client.set_connection_timeout(timeout_seconds_, 0);
    const auto body = nlohmann::json{{"texts", texts}}.dump();
    auto res = client.Post("/embed", body, "application/json");
    if (!res) throw ProviderUnavailable("embedding service " + base_url_ + " unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200) {
      throw ProviderUnavailable("embedding service " + base_url_ + " returned HTTP " + std::to_string(res->status));
    }
    try {
      const auto reply = nlohmann::json::parse(res->body);
      const auto dim = reply.at("dim").get<std::size_t>();
      if (dim != dim_) {
        throw DimensionMismatch("embedding service reports dim " + std::to_string(dim) + ", provider declares " +
                                std::to_string(dim_));
      }
      auto vectors = reply.at("vectors").get<std::vector<EmbeddingVector>>();
      if (vectors.size() != texts.size()) throw ProviderUnavailable("embedding service returned wrong vector count");
      return vectors;
    } catch (const nlohmann::json::exception& e) {
      throw ProviderUnavailable(std::string("malformed embedding service reply: ") + e.what());
    }
  }

 private:
  std::string base_url_;
  std::size_t dim_;
  std::string model_name_;
  int timeout_seconds_;
};

// Content-addressed vector store. Keys are SHA-256 over the provider identity,
// a NUL separator, then the exact text bytes. With a directory, entries persist
// as one-row matrix files; without, the cache is memory-only.
class EmbeddingCache {
 public:
  EmbeddingCache() = default;
  explicit EmbeddingCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(*dir_);
  }

  static std::string key(const std::string& provider_identity, std::string_view text) {
    return Sha256().update(provider_identity).update(std::string_view("\0", 1)).update(text).hex();
  }

  std::optional<EmbeddingVector> get(const std::string& k) const {
    {
      std::shared_lock lock(mu_);
      if (auto it = memory_.find(k); it != memory_.end()) return it->second;
    }
    if (!dir_) return std::nullopt;
    const auto path = entry_path(k);
    if (!std::filesystem::exists(path)) return std::nullopt;
    const MatrixF m = read_matrix_file(path);
    EmbeddingVector v(m.data(), m.data() + m.size());
    std::unique_lock lock(mu_);
    memory_.emplace(k, v);
    return v;
  }

  void put(const std::string& k, const EmbeddingVector& v) {
    std::unique_lock lock(mu_);
    memory_[k] = v;
    if (!dir_) return;
    const auto path = entry_path(k);
    std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    MatrixF m(1, static_cast<Eigen::Index>(v.size()));
    std::copy(v.begin(), v.end(), m.data());
    write_matrix_file(tmp, m);
    std::filesystem::rename(tmp, path);
  }

 private:
  std::filesystem::path entry_path(const std::string& k) const { return *dir_ / k.substr(0, 2) / (k + ".emb"); }

  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<std::string, EmbeddingVector> memory_;
};

struct EmbedOptions {
  std::size_t batch_size = 64;
  std::size_t max_in_flight = 1;  // honoured only for providers that allow concurrency
};

struct EmbedStats {
  std::size_t cache_hits = 0;
  std::size_t provider_calls = 0;   // batches sent
  std::size_t texts_embedded = 0;   // texts sent to the provider
};

namespace detail {

inline void validate_vector(const EmbeddingVector& v, std::size_t dim, const std::string& provider) {
  if (v.size() != dim) {
    throw DimensionMismatch("provider " + provider + " returned a " + std::to_string(v.size()) +
                            "-dim vector but declares " + std::to_string(dim));
  }
  for (float f : v) {
    if (!std::isfinite(f)) throw Error("provider " + provider + " returned a non-finite embedding entry");
  }
}

}  // namespace detail

// Embeds `texts` in order, consulting and filling `cache`. Rows of the result
// are the vectors; duplicate texts are sent to the provider once.
inline MatrixF embed_texts(EmbeddingProvider& provider, const std::vector<std::string>& texts, EmbeddingCache& cache,
                           const EmbedOptions& options = {}, EmbedStats* stats = nullptr) {
  if (texts.empty()) throw UserError("embed_texts: no texts");
  const std::size_t dim = provider.dim();
  const std::string identity = provider.identity();

  std::vector<std::string> keys(texts.size());
  std::unordered_map<std::string, EmbeddingVector> resolved;
  std::vector<std::string> pending;
  std::vector<std::string> pending_keys;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) throw UserError("embed_texts: empty text at position " + std::to_string(i));
    keys[i] = EmbeddingCache::key(identity, texts[i]);
    if (resolved.contains(keys[i])) continue;
    if (auto hit = cache.get(keys[i])) {
      resolved.emplace(keys[i], std::move(*hit));
      if (stats) ++stats->cache_hits;
    } else if (std::find(pending_keys.begin(), pending_keys.end(), keys[i]) == pending_keys.end()) {
      pending.push_back(texts[i]);
      pending_keys.push_back(keys[i]);
    }
  }

  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (std::size_t b = 0; b < pending.size(); b += batch) ranges.emplace_back(b, std::min(pending.size(), b + batch));

  auto run_batch = [&](std::size_t lo, std::size_t hi) {
    std::vector<std::string> chunk(pending.begin() + static_cast<std::ptrdiff_t>(lo),
                                   pending.begin() + static_cast<std::ptrdiff_t>(hi));
    auto vectors = provider.embed_batch(chunk);
    if (vectors.size() != chunk.size()) throw ProviderUnavailable("provider " + identity + " returned wrong vector count");
    for (const auto& v : vectors) detail::validate_vector(v, dim, identity);
    return vectors;
  };

  const std::size_t in_flight = provider.supports_concurrency() ? std::max<std::size_t>(1, options.max_in_flight) : 1;
  for (std::size_t r = 0; r < ranges.size(); r += in_flight) {
    const std::size_t r_end = std::min(ranges.size(), r + in_flight);
    std::vector<std::vector<EmbeddingVector>> results(r_end - r);
    if (in_flight == 1) {
      results[0] = run_batch(ranges[r].first, ranges[r].second);
    } else {
      std::vector<std::future<std::vector<EmbeddingVector>>> futures;
      for (std::size_t q = r; q < r_end; ++q) {
        futures.push_back(std::async(std::launch::async, run_batch, ranges[q].first, ranges[q].second));
      }
      for (std::size_t q = 0; q < futures.size(); ++q) results[q] = futures[q].get();
    }
    for (std::size_t q = r; q < r_end; ++q) {
      const auto& vectors = results[q - r];
      for (std::size_t j = 0; j < vectors.size(); ++j) {
        const auto& k = pending_keys[ranges[q].first + j];
        cache.put(k, vectors[j]);
        resolved.emplace(k, vectors[j]);
      }
      if (stats) {
        ++stats->provider_calls;
        stats->texts_embedded += vectors.size();
      }
    }
  }

  MatrixF out(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto& v = resolved.at(keys[i]);
    std::copy(v.begin(), v.end(), out.row(static_cast<Eigen::Index>(i)).data());
  }
  return out;
}

// N x D matrix of i.i.d. uniform(-1, 1) entries; a stand-in for statute
// content embeddings in the "content ignored" ablation.
inline MatrixF random_statute_embeddings(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n == 0 || d == 0) throw UserError("random_statute_embeddings: N and D must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> uni(-1.0f, 1.0f);
  MatrixF m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    float v;
    do {
      v = uni(rng);
    } while (v <= -1.0f || v >= 1.0f);
    m.data()[i] = v;
  }
  return m;
}

// Embedding artifact layout under a directory:
//   index.json       {"dim", "provider", "statutes": "statutes.emb", "cases": {case_id: file}}
//   statutes.emb     N x D (+ .json sidecar of content hashes)
//   cases/NNNNNN.emb |C| x D per case (+ sidecar)
class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  static EmbeddingStore open(const std::filesystem::path& dir) {
    EmbeddingStore store;
    store.dir_ = dir;
    std::ifstream is(dir / "index.json");
    if (!is) throw UserError("no embedding index at " + (dir / "index.json").string());
    try {
      const auto idx = nlohmann::json::parse(is);
      store.dim_ = idx.at("dim").get<std::size_t>();
      store.provider_ = idx.at("provider").get<std::string>();
      store.statutes_file_ = idx.at("statutes").get<std::string>();
      store.case_files_ = idx.at("cases").get<std::map<std::string, std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw UserError((dir / "index.json").string() + ": " + e.what());
    }
    return store;
  }

  std::size_t dim() const { return dim_; }
  const std::string& provider() const { return provider_; }
  const std::filesystem::path& dir() const { return dir_; }
  bool has_case(const std::string& case_id) const { return case_files_.contains(case_id); }
  std::size_t case_count() const { return case_files_.size(); }

  MatrixF statutes() const { return read_matrix_file(dir_ / statutes_file_); }

  MatrixF case_matrix(const std::string& case_id) const {
    auto it = case_files_.find(case_id);
    if (it == case_files_.end()) throw UserError("no embeddings for case " + case_id + " in " + dir_.string());
    return read_matrix_file(dir_ / it->second);
  }

 private:
  std::filesystem::path dir_;
  std::size_t dim_ = 0;
  std::string provider_;
  std::string statutes_file_;
  std::map<std::string, std::string> case_files_;
};

inline std::vector<std::string> text_hashes(const std::vector<std::string>& texts) {
  std::vector<std::string> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(sha256_hex(t));
  return out;
}

// Embeds every statute content (verbatim) and every case sentence, writing the
// store layout above. Expects a masked, truncated dataset.
inline EmbeddingStore embed_dataset(EmbeddingProvider& provider, const Dataset& dataset,
                                    const std::filesystem::path& out_dir, EmbeddingCache& cache,
                                    const EmbedOptions& options = {}, EmbedStats* stats = nullptr) {
  std::filesystem::create_directories(out_dir / "cases");
  std::vector<std::string> contents;
  for (const auto& s : dataset.registry) contents.push_back(s.content);
  const MatrixF statutes = embed_texts(provider, contents, cache, options, stats);
  write_matrix_file(out_dir / "statutes.emb", statutes, text_hashes(contents));

  nlohmann::ordered_json cases = nlohmann::ordered_json::object();
  std::size_t n = 0;
  for (const auto& c : dataset.cases) {
    MatrixF x;
    try {
      x = embed_texts(provider, c.sentences, cache, options, stats);
    } catch (const Error& e) {
      throw Error("case " + c.case_id + ": " + e.what());
    }
    char name[32];
    std::snprintf(name, sizeof name, "cases/%06zu.emb", n++);
    write_matrix_file(out_dir / name, x, text_hashes(c.sentences));
    cases[c.case_id] = name;
  }
  nlohmann::ordered_json idx{{"dim", provider.dim()},
                             {"provider", provider.identity()},
                             {"statutes", "statutes.emb"},
                             {"cases", cases}};
  std::ofstream(out_dir / "index.json") << idx.dump(2) << '\n';
  return EmbeddingStore::open(out_dir);
}

}  // namespace lexaos
