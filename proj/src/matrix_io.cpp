// Copyright 2026 The curmi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "curmi/matrix_io.hpp"

#include <cstring>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace curmi {

namespace {

constexpr char kMagic[4] = {'C', 'U', 'R', 'M'};

// All multi-byte header fields are little-endian on disk. The in-memory
// integers are written byte by byte so the code is endian-agnostic.
void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

}  // namespace

void save_matrix(const std::string& path, const MatrixF& m) {
  std::string header;
  header.append(kMagic, 4);
  put_u32(header, kMatrixFileVersion);
  put_u64(header, static_cast<std::uint64_t>(m.rows()));
  put_u64(header, static_cast<std::uint64_t>(m.cols()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);
  // Row-major Eigen storage matches the on-disk layout directly.
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(float) * static_cast<std::size_t>(m.size())));
  if (!out) throw FormatError("short write to '" + path + "'");
}

MatrixF load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");

  char header[24];
  in.read(header, sizeof(header));
  if (in.gcount() != sizeof(header)) throw FormatError("'" + path + "': truncated header");
  if (std::memcmp(header, kMagic, 4) != 0) throw FormatError("'" + path + "': bad magic");
  const std::uint32_t version = get_u32(header + 4);
  if (version != kMatrixFileVersion) {
    throw FormatError("'" + path + "': unsupported version " + std::to_string(version));
  }
  const std::uint64_t rows = get_u64(header + 8);
  const std::uint64_t cols = get_u64(header + 16);
  if (rows == 0 || cols == 0 || rows > (1ULL << 32) || cols > (1ULL << 32) ||
      rows * cols > (1ULL << 34)) {
    throw FormatError("'" + path + "': implausible dimensions");
  }

  MatrixF m(static_cast<Index>(rows), static_cast<Index>(cols));
  const std::size_t payload = sizeof(float) * static_cast<std::size_t>(rows * cols);
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(payload));
  if (static_cast<std::size_t>(in.gcount()) != payload) {
    throw FormatError("'" + path + "': truncated payload");
  }
  in.peek();
  if (!in.eof()) throw FormatError("'" + path + "': trailing bytes after payload");
  return m;
}

void save_matrix(const std::string& path, const MatrixD& m) {
  save_matrix(path, MatrixF(m.cast<float>()));
}

void save_vector(const std::string& path, const VectorD& v) {
  MatrixF m(v.size(), 1);
  for (Index i = 0; i < v.size(); ++i) m(i, 0) = static_cast<float>(v[i]);
  save_matrix(path, m);
}

VectorD load_vector(const std::string& path) {
  const MatrixF m = load_matrix(path);
  if (m.cols() != 1) throw FormatError("'" + path + "': expected a column vector");
  VectorD v(m.rows());
  for (Index i = 0; i < m.rows(); ++i) v[i] = static_cast<double>(m(i, 0));
  return v;
}

void save_mask(const std::string& path, const std::vector<std::uint8_t>& mask) {
  MatrixF m(static_cast<Index>(mask.size()), 1);
  for (std::size_t i = 0; i < mask.size(); ++i) m(static_cast<Index>(i), 0) = mask[i] ? 1.0f : 0.0f;
  save_matrix(path, m);
}

std::vector<std::uint8_t> load_mask(const std::string& path) {
  const MatrixF m = load_matrix(path);
  if (m.cols() != 1) throw FormatError("'" + path + "': expected a column vector");
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i) {
    const float v = m(i, 0);
    if (v != 0.0f && v != 1.0f) throw FormatError("'" + path + "': mask entries must be 0/1");
    mask[static_cast<std::size_t>(i)] = v != 0.0f;
  }
  return mask;
}

void save_target_set(const std::string& path, const TargetSet& ts, const std::string& extra_json) {
  ts.validate();
  nlohmann::json j;
  j["indices"] = ts.indices;
  j["selected"] = ts.selected_ids();
  if (!extra_json.empty()) {
    j["config"] = nlohmann::json::parse(extra_json);
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

TargetSet load_target_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("'" + path + "': " + e.what());
  }
  if (!j.contains("indices") || !j.contains("selected")) {
    throw FormatError("'" + path + "': missing indices/selected");
  }
  TargetSet ts;
  ts.indices = j["indices"].get<std::vector<std::int64_t>>();
  const auto sel_ids = j["selected"].get<std::vector<std::int64_t>>();
  ts.selected.assign(ts.indices.size(), 0);
  for (auto id : sel_ids) {
    bool found = false;
    for (std::size_t i = 0; i < ts.indices.size(); ++i) {
      if (ts.indices[i] == id) {
        ts.selected[i] = 1;
        found = true;
        break;
      }
    }
    if (!found) throw FormatError("'" + path + "': selected id not in indices");
  }
  ts.validate();
  return ts;
}

}  // namespace curmi
