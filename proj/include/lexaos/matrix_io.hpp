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

// Binary matrix container shared by embedding files and checkpoints.
//
//   magic  "AOSEMB1"            7 bytes
//   rows   u32 little-endian
//   cols   u32 little-endian
//   body   rows*cols float32 little-endian, row-major
//
// Embedding matrices carry a sidecar "<path>.json" with {"rows": [hash, ...]}
// naming the SHA-256 of the text each row was computed from.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lexaos/common.hpp"

namespace lexaos {

inline constexpr char kMatrixMagic[7] = {'A', 'O', 'S', 'E', 'M', 'B', '1'};

namespace detail {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

inline std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xFF) << 24) | ((v & 0xFF00) << 8) | ((v >> 8) & 0xFF00) | (v >> 24);
  }
  return v;
}

inline void write_u32(std::ostream& os, std::uint32_t v) {
  v = to_le(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

inline std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return to_le(v);
}

inline void write_f32(std::ostream& os, float f) { write_u32(os, std::bit_cast<std::uint32_t>(f)); }

inline float read_f32(std::istream& is) { return std::bit_cast<float>(read_u32(is)); }

}  // namespace detail

inline void write_matrix(std::ostream& os, const MatrixF& m) {
  os.write(kMatrixMagic, sizeof kMatrixMagic);
  detail::write_u32(os, static_cast<std::uint32_t>(m.rows()));
  detail::write_u32(os, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) detail::write_f32(os, m(r, c));
  }
  if (!os) throw Error("matrix write failed");
}

inline MatrixF read_matrix(std::istream& is, const std::string& source = "<stream>") {
  char magic[sizeof kMatrixMagic];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMatrixMagic, sizeof magic) != 0) {
    throw UserError(source + ": not an AOSEMB1 matrix");
  }
  const std::uint32_t rows = detail::read_u32(is);
  const std::uint32_t cols = detail::read_u32(is);
  if (!is) throw UserError(source + ": truncated matrix header");
  MatrixF m(rows, cols);
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) m(r, c) = detail::read_f32(is);
  }
  if (!is) throw UserError(source + ": truncated matrix body");
  return m;
}

inline void write_matrix_file(const std::filesystem::path& path, const MatrixF& m,
                              const std::vector<std::string>& row_hashes = {}) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    write_matrix(os, m);
  }
  if (!row_hashes.empty()) {
    if (row_hashes.size() != static_cast<std::size_t>(m.rows())) {
      throw ShapeError("row hash count does not match matrix rows for " + path.string());
    }
    std::ofstream js(path.string() + ".json", std::ios::trunc);
    js << nlohmann::json{{"rows", row_hashes}}.dump() << '\n';
  }
}

inline MatrixF read_matrix_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UserError("cannot open matrix file " + path.string());
  return read_matrix(is, path.string());
}

// Empty when no sidecar exists.
inline std::vector<std::string> read_row_index(const std::filesystem::path& matrix_path) {
  const std::filesystem::path sidecar = matrix_path.string() + ".json";
  if (!std::filesystem::exists(sidecar)) return {};
  std::ifstream is(sidecar);
  try {
    return nlohmann::json::parse(is).at("rows").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw UserError(sidecar.string() + ": bad row index: " + e.what());
  }
}

}  // namespace lexaos
