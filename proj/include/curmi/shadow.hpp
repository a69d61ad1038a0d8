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

#ifndef CURMI_SHADOW_HPP
#define CURMI_SHADOW_HPP

#include <cstdint>
#include <vector>

#include "curmi/curation.hpp"
#include "curmi/types.hpp"

namespace curmi {

/// Balanced shadow membership: shadow j contains target i iff
/// membership(j, i) == 1. Every column sums to exactly m/2.
struct ShadowAssignment {
  MatrixF membership;  // m x n, entries 0/1

  Index shadows() const { return membership.rows(); }
  Index targets() const { return membership.cols(); }
  std::vector<int> row_positions(Index shadow) const;
  bool contains(Index shadow, Index target) const { return membership(shadow, target) != 0.0f; }
};

enum class EnsembleKind { kScores, kMasks };

/// Per-shadow curation outputs: m x N score rows or m x N binary mask rows.
struct ShadowEnsemble {
  ShadowAssignment assignment;
  MatrixD outputs;  // m x N; f32-exact for scores, 0/1 for masks
  EnsembleKind kind = EnsembleKind::kScores;

  Index shadows() const { return outputs.rows(); }
  Index pool_size() const { return outputs.cols(); }
};

/// Per-pool-sample in/out means and population standard deviations for one
/// target's shadow split.
struct InOutStats {
  VectorD mu_in, mu_out;        // length N
  VectorD sigma_in, sigma_out;  // length N, >= 0
  Index target_id = 0;
};

ShadowAssignment build_assignment(Index n_targets, Index m_shadows, std::uint64_t seed);

ShadowEnsemble run_shadows(const Curator& curator, const ShadowAssignment& assignment,
                           EnsembleKind kind);

InOutStats in_out_stats(const ShadowEnsemble& ensemble, Index target_id);

/// k* = argmax_k |mu_in[k] - mu_out[k]|; ties to the lowest index.
Index select_kstar(const InOutStats& stats);

// Batched variant: computes, for every target at once, the most informative
// pool column and its in/out Gaussian parameters. Identical to calling
// in_out_stats + select_kstar per target, in one set of matrix products.
struct KstarTable {
  std::vector<Index> kstar;      // per target
  VectorD mu_in, mu_out;         // at kstar, per target
  VectorD sigma_in, sigma_out;   // at kstar, per target
};

KstarTable kstar_table(const ShadowEnsemble& ensemble);

}  // namespace curmi

#endif  // CURMI_SHADOW_HPP
