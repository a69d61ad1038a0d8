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

#ifndef CURMI_E2E_ATTACKS_HPP
#define CURMI_E2E_ATTACKS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "curmi/curation.hpp"
#include "curmi/types.hpp"

namespace curmi {

/// Percentile rank (0..100) of v within sorted ascending values, linear
/// interpolation between order statistics.
double percentile_rank(const VectorD& sorted_values, double v);

/// Value at percentile p (0..100) of sorted ascending values.
double percentile_value(const VectorD& sorted_values, double p);

/// counts[t] = number of pool samples whose similarity-argmax is target t
/// (ties to the lowest target index). Sums to the pool size.
std::vector<Index> influence_counts(const EmbeddingMatrix& pool, const EmbeddingMatrix& targets);

// ---------------------------------------------------------------------------
// Image-based fingerprinting: existing pool samples whose selection is
// conditioned on one target's membership.
// ---------------------------------------------------------------------------

struct FingerprintPlan {
  std::vector<Index> candidates;           // unique fingerprint pool indices
  std::vector<Index> mapping;              // target -> position in candidates
  std::vector<Index> inverse_counts;       // per candidate: #targets sharing it
  std::vector<double> baseline_percentile; // per candidate: p0 against full T
  double alpha = 0.5;
  double tau = 50.0;
  double sharpness = 10.0;
};

inline constexpr double kDefaultFingerprintAlpha = 0.5;
inline constexpr Index kDefaultFingerprintKnn = 50;

/// For each target, among its k_nn nearest pool candidates, picks the argmax
/// of alpha * sim(f, t) + (1 - alpha) * (1 - max_{t' != t} sim(f, t')).
FingerprintPlan craft_image_fingerprints(const EmbeddingMatrix& pool,
                                         const EmbeddingMatrix& targets, double alpha,
                                         Index k_nn);

/// Probability that a fingerprint with baseline percentile p0 is selected
/// absent its target: 1 / (1 + exp(-(p0 - tau) / sharpness)).
double image_selection_prob(double p0, double tau, double sharpness);

/// Surprise of the observed fingerprint selections under the no-member
/// hypothesis, weighted by 1/n_sharing and averaged per target.
/// selections[i] corresponds to plan.candidates[i].
AttackScores image_e2e_scores(const FingerprintPlan& plan, const std::vector<std::uint8_t>& selections);

/// Oracle upper bound for image curation given exact scores: 1 if the target
/// explains some pool score within tol, 0 if some similarity exceeds an
/// observed score by more than tol, 0.5 otherwise.
AttackScores oracle_attack_image(const EmbeddingMatrix& pool, const EmbeddingMatrix& targets,
                                 const VectorD& observed_scores, double tol = 1e-6);

/// Worst-case canary pair for image curation: among pool samples scoring at
/// or below the percentile cap, the pair with maximal mutual similarity.
std::pair<Index, Index> craft_image_canary(const EmbeddingMatrix& pool,
                                           const VectorD& observed_scores,
                                           double percentile_cap = 1.0);

// ---------------------------------------------------------------------------
// TRAK-based fingerprinting.
// ---------------------------------------------------------------------------

/// Empirical mean and covariance of the target gradients.
struct TargetGradientModel {
  VectorD mu;
  MatrixD sigma;       // full covariance, or diagonal when diagonal_only
  bool diagonal_only = false;
};

inline constexpr Index kFullCovarianceMaxDim = 512;

TargetGradientModel estimate_target_model(const GradientMatrix& target_grads,
                                          bool force_diagonal = false);

/// Post-insertion score of a probe row without refactorizing the Gram:
/// z = q_new * (p^T G^-1 y) / (1 + p^T G^-1 p).
double sherman_morrison_score(const TrakSystem& sys, const VectorD& probe,
                              const VectorD& mean_target, double q_new);

/// |p^T G^-1 c| / sqrt(m * p^T G^-1 Sigma G^-1 p); larger = more detectable.
double trak_snr(const TrakSystem& sys, const VectorD& probe, const VectorD& canary,
                const TargetGradientModel& model, double m_subset);

struct TrakFingerprintPlan {
  MatrixD fingerprints;           // |F| x d_proj candidate gradients
  std::vector<Index> best;        // per target: argmax-SNR candidate
  VectorD noise_scales;           // nu_i per candidate
  VectorD confidences;            // per target: SNR at its best candidate
  MatrixD signal;                 // |F| x n signal matrix F G^-1 Y^T
  double rho = 90.0;
  bool sigma_degenerate = false;  // fell back to diagonal covariance
};

TrakFingerprintPlan craft_trak_fingerprints(const TrakSystem& sys,
                                            const GradientMatrix& target_grads,
                                            const MatrixD& candidate_grads,
                                            const TargetGradientModel& model);

struct TrakE2eOptions {
  double rho = 90.0;     // percentile threshold assumption, in (0, 100)
  double assumed_m = 0;  // assumed |T_sel|; <= 0 selects n/2
  double q_new = 0;      // scaling for injected rows; <= 0 selects mean pool q
};

/// Full fingerprint-detection attack: per target, its best-SNR fingerprint's
/// H0/H1 percentile shift counts as confidence when the fingerprint was
/// selected and the pair straddles rho. observed_selection covers
/// pool + fingerprints (fingerprint rows appended after the pool).
AttackScores trak_e2e_attack(const TrakSystem& sys, const GradientMatrix& target_grads,
                             const MatrixD& fingerprints, double rho,
                             const std::vector<std::uint8_t>& observed_selection, int k,
                             const TrakE2eOptions& opts = {});

}  // namespace curmi

#endif  // CURMI_E2E_ATTACKS_HPP
