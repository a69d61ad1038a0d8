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

#include "curmi/types.hpp"

#include <cmath>
#include <unordered_set>

namespace curmi {

namespace {
constexpr double kRowNormTol = 1e-6;
constexpr double kScoreSentinel = -1e30;
}  // namespace

EmbeddingMatrix EmbeddingMatrix::validated(MatrixF m, bool require_norm) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw ParameterError("embedding matrix must have at least one row and column");
  }
  if (!m.allFinite()) {
    throw ParameterError("embedding matrix has non-finite entries");
  }
  if (require_norm) {
    for (Index i = 0; i < m.rows(); ++i) {
      const double norm = m.row(i).cast<double>().norm();
      if (std::abs(norm - 1.0) > kRowNormTol) {
        throw ParameterError("embedding row " + std::to_string(i) +
                             " is not unit-normalized (norm=" + std::to_string(norm) + ")");
      }
    }
  }
  EmbeddingMatrix out;
  out.data = std::move(m);
  out.row_norm = require_norm;
  return out;
}

GradientMatrix GradientMatrix::with_unit_q(MatrixF m) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw ParameterError("gradient matrix must have at least one row and column");
  }
  if (!m.allFinite()) {
    throw ParameterError("gradient matrix has non-finite entries");
  }
  GradientMatrix out;
  out.q = VectorD::Ones(m.rows());
  out.data = std::move(m);
  return out;
}

std::size_t TargetSet::selected_count() const {
  std::size_t c = 0;
  for (auto f : selected) c += (f != 0);
  return c;
}

std::vector<int> TargetSet::selected_positions() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (selected[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<std::int64_t> TargetSet::selected_ids() const {
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (selected[i]) out.push_back(indices[i]);
  }
  return out;
}

void TargetSet::validate() const {
  if (selected.size() != indices.size()) {
    throw ParameterError("target set flags length does not match indices");
  }
  std::unordered_set<std::int64_t> seen;
  for (auto id : indices) {
    if (!seen.insert(id).second) {
      throw ParameterError("duplicate target id " + std::to_string(id));
    }
  }
}

std::string to_string(CurationMethod m) {
  return m == CurationMethod::kImageNN ? "image" : "trak";
}

CurationMethod curation_method_from_string(const std::string& s) {
  if (s == "image") return CurationMethod::kImageNN;
  if (s == "trak") return CurationMethod::kTrak;
  throw ParameterError("unknown curation method '" + s + "' (expected image|trak)");
}

void clamp_scores(VectorD& v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) v[i] = v[i] > 0 ? -kScoreSentinel : kScoreSentinel;
  }
}

VectorD quantize_f32(const VectorD& v) {
  return v.cast<float>().cast<double>();
}

MatrixD quantize_f32(const MatrixD& m) {
  return m.cast<float>().cast<double>();
}

}  // namespace curmi
