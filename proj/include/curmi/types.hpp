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

#ifndef CURMI_TYPES_HPP
#define CURMI_TYPES_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace curmi {

// Matrices persist as f32 (row-major, matching the on-disk layout); all
// linear algebra promotes to f64 before accumulating.
using MatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using VectorD = Eigen::VectorXd;
using Index = Eigen::Index;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument / precondition violation. CLI exit code 1.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated file. CLI exit code 1.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (e.g. Cholesky on non-finite input). CLI exit code 2.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Requested object does not exist (e.g. no low-scoring canary pair).
class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Dense embedding matrix, one sample per row.
struct EmbeddingMatrix {
  MatrixF data;
  bool row_norm = false;

  Index rows() const { return data.rows(); }
  Index dim() const { return data.cols(); }

  // Validates finiteness and (optionally) unit row norms; throws
  // ParameterError on violation and stamps row_norm on success.
  static EmbeddingMatrix validated(MatrixF m, bool require_norm = true);
};

/// Projected per-sample gradients plus output-to-loss scaling factors q.
struct GradientMatrix {
  MatrixF data;
  VectorD q;  // length == rows(); positive

  Index rows() const { return data.rows(); }
  Index dim() const { return data.cols(); }

  static GradientMatrix with_unit_q(MatrixF m);
};

/// The private target set: ordered ids plus the selected subset T_sel.
struct TargetSet {
  std::vector<std::int64_t> indices;
  std::vector<std::uint8_t> selected;  // parallel to indices

  std::size_t size() const { return indices.size(); }
  std::size_t selected_count() const;
  std::vector<int> selected_positions() const;
  std::vector<std::int64_t> selected_ids() const;

  void validate() const;  // unique ids, flags length
};

enum class CurationMethod { kImageNN, kTrak };

std::string to_string(CurationMethod m);
CurationMethod curation_method_from_string(const std::string& s);

/// Output of one curation run: scores over the pool plus the top-k mask.
struct CurationResult {
  VectorD scores;                  // length N, f32-exact values
  std::vector<std::uint8_t> mask;  // length N, exactly k ones
  int k = 0;
  CurationMethod method = CurationMethod::kImageNN;
};

/// Per-target membership-inference scores, higher = stronger member evidence.
struct AttackScores {
  VectorD values;
  std::vector<std::uint8_t> labels;  // optional ground truth; empty if unknown
  std::string attack_name;

  bool has_labels() const { return !labels.empty(); }
};

// Clamps non-finite attack scores to a large negative sentinel so that
// downstream ROC code never sees inf/NaN.
void clamp_scores(VectorD& v);

// Rounds every entry through f32, the stage-boundary precision. Results
// composed through MatrixFile round trips are then bit-identical to
// in-process composition.
VectorD quantize_f32(const VectorD& v);
MatrixD quantize_f32(const MatrixD& m);

}  // namespace curmi

#endif  // CURMI_TYPES_HPP
