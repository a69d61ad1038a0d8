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

#ifndef CURMI_SCORE_ATTACKS_HPP
#define CURMI_SCORE_ATTACKS_HPP

#include <vector>

#include "curmi/curation.hpp"
#include "curmi/shadow.hpp"
#include "curmi/types.hpp"

namespace curmi {

inline constexpr double kVarianceFloor = 1e-12;
inline constexpr double kVotingTol = 1e-6;

/// Gaussian log-likelihood ratio of the observed score at the target's most
/// informative pool sample: log p(s | N_in) - log p(s | N_out), variances
/// floored at kVarianceFloor.
double lira_gaussian(const ShadowEnsemble& ensemble, const VectorD& observed_scores,
                     Index target_id);

/// All targets at once (batched k* + Gaussian LLR).
AttackScores lira_gaussian_all(const ShadowEnsemble& ensemble, const VectorD& observed_scores);

/// Deterministic nearest-neighbor reverse engineering: the target whose
/// similarity matches each observed score within tol gets +1; every target
/// whose similarity exceeds the score by more than tol gets -1.
AttackScores voting_image(const EmbeddingMatrix& pool, const EmbeddingMatrix& targets,
                          const VectorD& observed_scores, double tol = kVotingTol);

struct LeastSquaresResult {
  AttackScores scores;    // the recovered mean-operator weights m*
  double residual = 0.0;  // ||A m* - b||
  double b_norm = 0.0;
  bool degenerate = false;  // rank-deficient system, minimum-norm solution
};

/// Recovers the membership mean-operator m from observed TRAK scores by
/// solving the feature-space normal system  min_m ||Phi^T Phi Y^T m -
/// Phi^T (s / q)||_2. Noiseless consistent systems with d_proj >= n recover
/// m exactly (members 1/k, non-members 0).
LeastSquaresResult least_squares_trak(const TrakSystem& sys, const GradientMatrix& target_grads,
                                      const VectorD& observed_scores);

struct SparseRecovery {
  std::vector<Index> support;
  VectorD weights;  // dense, zeros off support
  double residual = 0.0;
  bool diverged = false;
};

/// Greedy orthogonal matching pursuit: k columns picked by maximal
/// |correlation with residual|, least squares re-solved on the support each
/// step. Stops early on a (numerically) zero residual.
SparseRecovery omp_recover(const MatrixD& a, const VectorD& b, int sparsity);

/// Iterative hard thresholding: x <- H_k(x + step * A^T (b - A x)). step <= 0
/// selects 1/sigma_max(A)^2 estimated by 20 power iterations. Sets `diverged`
/// if the residual grows 10x over its initial value.
SparseRecovery iht_recover(const MatrixD& a, const VectorD& b, int sparsity, int iters,
                           double step = 0.0);

/// Weighted average of min-max normalized scores: w * norm(a) + (1-w) *
/// norm(b). Constant vectors normalize to all 0.5.
AttackScores combine_scores(const AttackScores& a, const AttackScores& b, double w);

}  // namespace curmi

#endif  // CURMI_SCORE_ATTACKS_HPP
