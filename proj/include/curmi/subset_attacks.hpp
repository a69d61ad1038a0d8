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

#ifndef CURMI_SUBSET_ATTACKS_HPP
#define CURMI_SUBSET_ATTACKS_HPP

#include <cstdint>
#include <vector>

#include "curmi/curation.hpp"
#include "curmi/shadow.hpp"
#include "curmi/types.hpp"

namespace curmi {

/// Laplace-style smoothing scaled to the ensemble size.
inline double default_bernoulli_clamp(Index m_shadows) {
  return 1.0 / (static_cast<double>(m_shadows) + 2.0);
}

/// Bernoulli log-likelihood ratio at the target's most informative pool
/// column of the mask ensemble; selection frequencies clamped to
/// [clamp, 1-clamp].
double binary_lira(const ShadowEnsemble& ensemble, const std::vector<std::uint8_t>& observed_mask,
                   Index target_id, double clamp);

AttackScores binary_lira_all(const ShadowEnsemble& ensemble,
                             const std::vector<std::uint8_t>& observed_mask, double clamp);

/// Sigmoid around the per-shadow selection threshold:
/// 1 / (1 + exp(-gamma * (s - pi_k) / temp)).
VectorD soft_binarize(const VectorD& shadow_scores, double pi_k, double gamma, double temp);

/// Binary LiRA with Bernoulli means fitted from soft labels of the
/// continuous shadow scores (observation stays binary). temp <= 0 selects the
/// per-column default IQR/10.
double binary_lira_soft(const ShadowEnsemble& ensemble, int k,
                        const std::vector<std::uint8_t>& observed_mask, Index target_id,
                        double gamma, double temp, double clamp);

AttackScores binary_lira_soft_all(const ShadowEnsemble& ensemble, int k,
                                  const std::vector<std::uint8_t>& observed_mask, double gamma,
                                  double temp, double clamp);

struct IterationRecord {
  int iteration = 0;
  Index hypothesis_size = 0;
  Index overweighted = 0;
  Index underweighted = 0;
  double jaccard = 0.0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  VectorD votes;  // final cumulative votes per target
  bool converged = false;
};

struct IterativeVotingParams {
  double theta = 0.999;
  int patience = 5;
  double epsilon = 1e-4;
  int max_iters = 50;
};

struct IterativeVotingResult {
  IterationTrace trace;
  AttackScores scores;
};

/// Hypothesis-elimination attack on a top-k selection mask: curate under the
/// current hypothesis set, attribute overweighted/underweighted pool samples
/// to their nearest hypothesis target, vote, drop negative-vote targets, and
/// stop once the hypothesis selection matches the observed one (J >= theta)
/// or improvement stalls.
IterativeVotingResult iterative_voting(const Curator& curator,
                                       const std::vector<std::uint8_t>& observed_mask,
                                       const IterativeVotingParams& params = {});

double jaccard_similarity(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b);

}  // namespace curmi

#endif  // CURMI_SUBSET_ATTACKS_HPP
