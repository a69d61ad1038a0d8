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

#ifndef CURMI_MATRIX_IO_HPP
#define CURMI_MATRIX_IO_HPP

#include <string>

#include "curmi/types.hpp"

namespace curmi {

// MatrixFile binary format:
//   magic   4 bytes  "CURM"
//   version u32 LE   (currently 1)
//   rows    u64 LE
//   cols    u64 LE
//   payload rows*cols f32 LE, row-major
// load(save(M)) is bit-identical; any header mismatch or size mismatch is a
// FormatError.
inline constexpr std::uint32_t kMatrixFileVersion = 1;

void save_matrix(const std::string& path, const MatrixF& m);
MatrixF load_matrix(const std::string& path);

// Convenience wrappers quantizing through f32 on the way out.
void save_matrix(const std::string& path, const MatrixD& m);
void save_vector(const std::string& path, const VectorD& v);  // n x 1
VectorD load_vector(const std::string& path);

void save_mask(const std::string& path, const std::vector<std::uint8_t>& mask);
std::vector<std::uint8_t> load_mask(const std::string& path);

// TargetSet JSON: {"indices":[...],"selected":[...]}, selected being the
// subset of ids. Extra keys (e.g. embedded run config) are preserved on save
// via `extra` and ignored on load.
void save_target_set(const std::string& path, const TargetSet& ts, const std::string& extra_json = "");
TargetSet load_target_set(const std::string& path);

}  // namespace curmi

#endif  // CURMI_MATRIX_IO_HPP
