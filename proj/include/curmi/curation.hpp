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

#ifndef CURMI_CURATION_HPP
#define CURMI_CURATION_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "curmi/types.hpp"

namespace curmi {

/// Pool-gradient ridge system shared by all TRAK computations:
/// g_inv = (X^T X + lambda I)^-1 (via Cholesky), phi = X * g_inv.
struct TrakSystem {
  MatrixD g_inv;   // d_proj x d_proj, symmetric positive definite
  MatrixD phi;     // N x d_proj
  VectorD q;       // length N, positive
  double lambda = 0.0;

  Index pool_size() const { return phi.rows(); }
  Index dim() const { return g_inv.rows(); }
};

/// Default ridge: 1e-3 * trace(X^T X) / d_proj.
double default_trak_lambda(const GradientMatrix& pool_grads);

TrakSystem trak_features(const GradientMatrix& pool_grads, double lambda);

/// Nearest-neighbor cosine score: scores[i] = max_j <pool_i, target_j>.
/// Both inputs must be row-normalized.
VectorD image_scores(const EmbeddingMatrix& pool, const EmbeddingMatrix& targets);

/// Full pool-vs-target cosine table, N x n (f64, not quantized).
MatrixD similarity_table(const EmbeddingMatrix& pool, const EmbeddingMatrix& targets);

/// Mean-target attribution score: (phi . mean(G_selected))^T elementwise* q.
VectorD trak_scores(const TrakSystem& sys, const GradientMatrix& target_grads,
                    std::span<const int> selected);

/// Exactly k ones; all selected scores >= all unselected; ties broken by
/// ascending index (lower index wins).
std::vector<std::uint8_t> top_k_select(const VectorD& scores, int k);

/// Score of the k-th ranked sample under the same tie-break (the smallest
/// selected value).
double top_k_threshold(const VectorD& scores, int k);

/// Seeded Rademacher projection (+-1/sqrt(d_proj)), the optional pre-step for
/// raw gradients.
GradientMatrix project_gradients(const GradientMatrix& raw, std::uint64_t seed, Index d_proj);

// ---------------------------------------------------------------------------

/// One victim pipeline bound to its pool data: scores any target subset and
/// applies top-k selection. Image mode precomputes the pool-vs-target cosine
/// table so shadow ensembles and iterative attacks reuse it.
class Curator {
 public:
  static Curator image(EmbeddingMatrix pool, EmbeddingMatrix targets, int k);
  static Curator trak(TrakSystem sys, GradientMatrix target_grads, int k);

  CurationResult run(std::span<const int> selected) const;
  VectorD scores(std::span<const int> selected) const;  // f32-exact values

  CurationMethod method() const { return method_; }
  Index pool_size() const;
  Index target_count() const;
  int k() const { return k_; }

  /// Image mode only: cosine of pool row x against target column t.
  const MatrixD& table() const;

 private:
  Curator() = default;

  CurationMethod method_ = CurationMethod::kImageNN;
  int k_ = 0;
  // image mode
  MatrixD table_;
  // trak mode
  TrakSystem sys_;
  GradientMatrix target_grads_;
};

std::vector<int> all_positions(Index n);

}  // namespace curmi

#endif  // CURMI_CURATION_HPP
