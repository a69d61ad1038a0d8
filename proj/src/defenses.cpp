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

#include "curmi/defenses.hpp"

#include <cmath>

#include "curmi/curation.hpp"
#include "curmi/rng.hpp"

namespace curmi {

void DpParams::validate() const {
  if (!(epsilon > 0)) throw ParameterError("dp: epsilon must be > 0");
  if (!(delta > 0) || !(delta < 1)) throw ParameterError("dp: delta must be in (0, 1)");
  if (!(clip > 0)) throw ParameterError("dp: clip must be > 0");
}

double gaussian_sigma(double sensitivity, double epsilon, double delta) {
  if (!(sensitivity > 0) || !(epsilon > 0) || !(delta > 0) || !(delta < 1)) {
    throw ParameterError("gaussian_sigma: all parameters must be positive, delta < 1");
  }
  return sensitivity / epsilon * std::sqrt(2.0 * std::log(1.25 / delta));
}

VectorD dp_noisy_max_scores(const EmbeddingMatrix& pool, const EmbeddingMatrix& targets,
                            const DpParams& params) {
  params.validate();
  const MatrixD table = similarity_table(pool, targets);
  const double sigma = gaussian_sigma(2.0, params.epsilon, params.delta);

  VectorD out(table.rows());
  for (Index x = 0; x < table.rows(); ++x) {
    // Fresh noise per (pool, target) pair; per-pool-row substream keeps
    // parallel evaluation order-independent.
    Rng rng = Rng::substream(params.seed, "dp.noisymax", static_cast<std::uint64_t>(x));
    double best = table(x, 0) + sigma * rng.gaussian();
    for (Index t = 1; t < table.cols(); ++t) {
      best = std::max(best, table(x, t) + sigma * rng.gaussian());
    }
    out[x] = best;
  }
  return quantize_f32(out);
}

VectorD dp_mean_scores(const EmbeddingMatrix& pool, const EmbeddingMatrix& targets,
                       const DpParams& params) {
  params.validate();
  if (pool.dim() != targets.dim()) throw ParameterError("dp_mean_scores: dimension mismatch");
  if (targets.rows() < 1) throw ParameterError("dp_mean_scores: empty target set");
  if (!pool.row_norm || !targets.row_norm) {
    throw ParameterError("dp_mean_scores: embeddings must be row-normalized");
  }

  const double sensitivity = 2.0 / static_cast<double>(targets.rows());
  const double sigma = gaussian_sigma(sensitivity, params.epsilon, params.delta);
  const VectorD mean = targets.data.cast<double>().colwise().mean().transpose();

  // One noise draw per curation; retry on a (measure-zero) zero-norm result.
  VectorD noisy;
  double norm = 0.0;
  for (std::uint64_t attempt = 0; attempt < 3; ++attempt) {
    Rng rng = Rng::substream(params.seed, "dp.mean", attempt);
    noisy = mean + sigma * rng.gaussian_vector(mean.size());
    norm = noisy.norm();
    if (norm > 1e-12) break;
  }
  if (norm <= 1e-12) throw NumericError("dp_mean_scores: noisy mean vanished after 3 retries");
  noisy /= norm;  // true cosine: normalize the noisy vector

  const VectorD cos = pool.data.cast<double>() * noisy;
  return quantize_f32(cos);
}

MatrixD clip_rows(const MatrixD& g, double c) {
  if (!(c > 0)) throw ParameterError("clip_rows: clip must be > 0");
  MatrixD out = g;
  for (Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > c) out.row(i) *= c / norm;
  }
  return out;
}

VectorD dp_trak_mean_gradient(const GradientMatrix& target_grads,
                              const std::vector<int>& selected, const DpParams& params) {
  params.validate();
  if (selected.empty()) throw ParameterError("dp_trak_mean_gradient: empty selection");
  for (int s : selected) {
    if (s < 0 || s >= target_grads.rows()) {
      throw ParameterError("dp_trak_mean_gradient: index out of range");
    }
  }

  const auto t_sel = static_cast<double>(selected.size());
  MatrixD rows(static_cast<Index>(selected.size()), target_grads.dim());
  for (std::size_t i = 0; i < selected.size(); ++i) {
    rows.row(static_cast<Index>(i)) = target_grads.data.row(selected[i]).cast<double>();
  }
  const MatrixD clipped = clip_rows(rows, params.clip);
  VectorD mean = clipped.colwise().mean().transpose();

  const double sigma = gaussian_sigma(2.0 * params.clip / t_sel, params.epsilon, params.delta);
  Rng rng = Rng::substream(params.seed, "dp.trak");
  mean += sigma * rng.gaussian_vector(mean.size());
  return mean;
}

}  // namespace curmi
