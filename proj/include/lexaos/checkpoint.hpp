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

// Checkpoint container:
//
//   magic        "AOSCKPT"
//   version      u32 (kCheckpointVersion)
//   header_len   u32, then that many bytes of JSON: config, optimizer, seed,
//                epoch, dev metrics, statute names, provenance
//   tensor_count u32, then per tensor:
//     name_len u32, name bytes, one AOSEMB1 matrix
//
// Tensors are the AosParameters in their canonical order followed by "Y", the
// statute embedding matrix the model was trained against.

#pragma once

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "lexaos/aos_model.hpp"
#include "lexaos/matrix_io.hpp"

namespace lexaos {

inline constexpr char kCheckpointMagic[7] = {'A', 'O', 'S', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig config;
  AosParameters<double> params;
  MatrixF statute_embeddings;
  std::vector<std::string> statute_names;
  nlohmann::json meta = nlohmann::json::object();  // optimizer, seed, epoch, dev_metrics, provenance
};

inline void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");

  nlohmann::json header = ck.meta;
  header["format_version"] = kCheckpointVersion;
  header["config"] = ck.config;
  header["statutes"] = ck.statute_names;
  const std::string header_text = header.dump();

  os.write(kCheckpointMagic, sizeof kCheckpointMagic);
  detail::write_u32(os, kCheckpointVersion);
  detail::write_u32(os, static_cast<std::uint32_t>(header_text.size()));
  os.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));

  const auto tensors = ck.params.tensors(ck.config.heads);
  detail::write_u32(os, static_cast<std::uint32_t>(tensors.size() + 1));
  auto write_named = [&](const std::string& name, const MatrixF& m) {
    detail::write_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_matrix(os, m);
  };
  for (const auto& t : tensors) {
    MatrixF m(t.rows, t.cols);
    for (std::size_t k = 0; k < t.values.size(); ++k) m.data()[k] = static_cast<float>(t.values[k]);
    write_named(t.name, m);
  }
  write_named("Y", ck.statute_embeddings);
  if (!os) throw Error("checkpoint write failed: " + path.string());
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UserError("cannot open checkpoint " + path.string());
  char magic[sizeof kCheckpointMagic];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
    throw UserError(path.string() + ": not a checkpoint file");
  }
  const auto version = detail::read_u32(is);
  if (version != kCheckpointVersion) {
    throw UserError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  }
  std::string header_text(detail::read_u32(is), '\0');
  is.read(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  if (!is) throw UserError(path.string() + ": truncated header");

  Checkpoint ck;
  try {
    ck.meta = nlohmann::json::parse(header_text);
    ck.config = ck.meta.at("config").get<ModelConfig>();
    ck.statute_names = ck.meta.at("statutes").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw UserError(path.string() + ": bad checkpoint header: " + e.what());
  }
  ck.meta.erase("config");
  ck.meta.erase("statutes");
  ck.meta.erase("format_version");
  ck.config.validate();

  std::unordered_map<std::string, MatrixF> blobs;
  const auto count = detail::read_u32(is);
  for (std::uint32_t k = 0; k < count; ++k) {
    std::string name(detail::read_u32(is), '\0');
    is.read(name.data(), static_cast<std::streamsize>(name.size()));
    blobs.emplace(name, read_matrix(is, path.string() + ":" + name));
  }

  ck.params = AosParameters<double>::zeros(ck.config);
  for (auto& t : ck.params.tensors(ck.config.heads)) {
    auto it = blobs.find(t.name);
    if (it == blobs.end()) throw UserError(path.string() + ": missing tensor " + t.name);
    if (it->second.rows() != t.rows || it->second.cols() != t.cols) {
      throw UserError(path.string() + ": tensor " + t.name + " has the wrong shape");
    }
    for (std::size_t k = 0; k < t.values.size(); ++k) t.values[k] = static_cast<double>(it->second.data()[k]);
  }
  auto y = blobs.find("Y");
  if (y == blobs.end()) throw UserError(path.string() + ": missing statute embeddings");
  ck.statute_embeddings = std::move(y->second);
  if (ck.statute_embeddings.rows() != ck.config.num_statutes || ck.statute_embeddings.cols() != ck.config.input_dim) {
    throw UserError(path.string() + ": statute embedding shape does not match config");
  }
  return ck;
}

}  // namespace lexaos
