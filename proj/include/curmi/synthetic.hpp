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

#ifndef CURMI_SYNTHETIC_HPP
#define CURMI_SYNTHETIC_HPP

#include <cstdint>
#include <optional>

#include "curmi/types.hpp"

namespace curmi {

/// n unit-normalized rows drawn from `clusters` Gaussian bumps on the sphere.
/// Deterministic given seed; row i belongs to bump i % clusters.
EmbeddingMatrix generate_embeddings(std::uint64_t seed, Index n, Index d, Index clusters,
                                    double spread);

/// Rows i.i.d. standard Gaussian, q = 1. `signal`, when present, is added to
/// every row (1 x d_proj) or per row (n x d_proj).
GradientMatrix generate_gradients(std::uint64_t seed, Index n, Index d_proj,
                                  const std::optional<MatrixD>& signal = std::nullopt);

/// Marks exactly round(fraction * |T|) targets selected, uniformly without
/// replacement.
TargetSet sample_selected(const TargetSet& targets, double fraction, std::uint64_t seed);

TargetSet make_target_set(Index n);  // ids 0..n-1, nothing selected

// ---------------------------------------------------------------------------
// Experiment fixtures (image-based geometry with controlled influence
// structure).
// ---------------------------------------------------------------------------

struct WitnessFixture {
  EmbeddingMatrix pool;     // probes first (probes_per_target per target), then background
  EmbeddingMatrix targets;  // n_targets rows
};

/// Every target is the nearest neighbor of its `probes_per_target` dedicated
/// pool probes; background rows are unrelated. Guarantees non-zero influence
/// for every target.
WitnessFixture make_witness_fixture(std::uint64_t seed, Index n_targets, Index probes_per_target,
                                    Index n_background, Index d, double closeness);

struct HubFixture {
  EmbeddingMatrix pool;
  EmbeddingMatrix targets;  // hubs first, then shielded targets
  Index n_hubs = 0;
};

/// Hub-concentrated geometry: each hub is the nearest neighbor for a cluster
/// of pool probes while `shielded_per_hub` targets sit slightly further from
/// the same probes. Removing a hub makes its shielded targets influential.
HubFixture make_hub_fixture(std::uint64_t seed, Index n_hubs, Index shielded_per_hub,
                            Index probes_per_hub, Index d);

}  // namespace curmi

#endif  // CURMI_SYNTHETIC_HPP
