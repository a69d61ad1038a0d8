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

#ifndef CURMI_DEFENSES_HPP
#define CURMI_DEFENSES_HPP

#include <cstdint>

#include "curmi/types.hpp"

namespace curmi {

/// (epsilon, delta) Gaussian-mechanism parameters; clip applies to TRAK only.
struct DpParams {
  double epsilon = 1.0;
  double delta = 1e-5;
  double clip = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Closed-form Gaussian mechanism noise scale:
/// sigma = (sensitivity / epsilon) * sqrt(2 log(1.25 / delta)).
double gaussian_sigma(double sensitivity, double epsilon, double delta);

/// Report Noisy Max over per-target similarities: fresh N(0, sigma^2) per
/// (pool, target) pair, sensitivity 2, then the max.
VectorD dp_noisy_max_scores(const EmbeddingMatrix& pool, const EmbeddingMatrix& targets,
                            const DpParams& params);

/// Cosine against the noisy target mean (one noise draw per curation,
/// sensitivity 2/|T|); the noisy mean is re-normalized inside the cosine.
VectorD dp_mean_scores(const EmbeddingMatrix& pool, const EmbeddingMatrix& targets,
                       const DpParams& params);

/// Clip rows to L2 norm <= C.
MatrixD clip_rows(const MatrixD& g, double c);

/// Privatized mean gradient: mean of clipped selected rows plus
/// N(0, sigma^2 I) with sigma = (2C / (|T_sel| epsilon)) sqrt(2 log(1.25/delta)).
VectorD dp_trak_mean_gradient(const GradientMatrix& target_grads,
                              const std::vector<int>& selected, const DpParams& params);

}  // namespace curmi

#endif  // CURMI_DEFENSES_HPP
