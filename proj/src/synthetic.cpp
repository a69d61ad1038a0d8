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

#include "curmi/synthetic.hpp"

#include <cmath>
#include <vector>

#include "curmi/rng.hpp"

namespace curmi {

EmbeddingMatrix generate_embeddings(std::uint64_t seed, Index n, Index d, Index clusters,
                                    double spread) {
  if (n < 1 || d < 1 || clusters < 1) {
    throw ParameterError("generate_embeddings: n, d and clusters must be >= 1");
  }
  if (!(spread > 0)) throw ParameterError("generate_embeddings: spread must be > 0");

  std::vector<VectorD> centers(static_cast<std::size_t>(clusters));
  for (Index c = 0; c < clusters; ++c) {
    Rng rng = Rng::substream(seed, "emb.center", static_cast<std::uint64_t>(c));
    centers[static_cast<std::size_t>(c)] = rng.unit_vector(d);
  }

  MatrixF m(n, d);
  for (Index i = 0; i < n; ++i) {
    Rng rng = Rng::substream(seed, "emb.row", static_cast<std::uint64_t>(i));
    VectorD v = centers[static_cast<std::size_t>(i % clusters)] + spread * rng.gaussian_vector(d);
    double norm = v.norm();
    while (norm < 1e-12) {
      v = rng.gaussian_vector(d);
      norm = v.norm();
    }
    m.row(i) = (v / norm).cast<float>();
  }
  EmbeddingMatrix out;
  out.data = std::move(m);
  out.row_norm = true;
  return out;
}

GradientMatrix generate_gradients(std::uint64_t seed, Index n, Index d_proj,
                                  const std::optional<MatrixD>& signal) {
  if (n < 1 || d_proj < 1) {
    throw ParameterError("generate_gradients: n and d_proj must be >= 1");
  }
  if (signal && signal->cols() != d_proj) {
    throw ParameterError("generate_gradients: signal column count must equal d_proj");
  }
  if (signal && signal->rows() != 1 && signal->rows() != n) {
    throw ParameterError("generate_gradients: signal must have 1 or n rows");
  }

  MatrixF m(n, d_proj);
  for (Index i = 0; i < n; ++i) {
    Rng rng = Rng::substream(seed, "grad.row", static_cast<std::uint64_t>(i));
    VectorD v = rng.gaussian_vector(d_proj);
    if (signal) {
      v += signal->row(signal->rows() == 1 ? 0 : i).transpose();
    }
    m.row(i) = v.cast<float>();
  }
  return GradientMatrix::with_unit_q(std::move(m));
}

TargetSet sample_selected(const TargetSet& targets, double fraction, std::uint64_t seed) {
  targets.validate();
  const auto n = targets.size();
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw ParameterError("sample_selected: fraction must be in (0, 1]");
  }
  const auto want = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (want < 1) throw ParameterError("sample_selected: selection would be empty");

  // Partial Fisher-Yates over positions.
  std::vector<std::size_t> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[i] = i;
  Rng rng = Rng::substream(seed, "select");
  for (std::size_t i = 0; i < want; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(n - i));
    std::swap(pos[i], pos[j]);
  }

  TargetSet out;
  out.indices = targets.indices;
  out.selected.assign(n, 0);
  for (std::size_t i = 0; i < want; ++i) out.selected[pos[i]] = 1;
  return out;
}

TargetSet make_target_set(Index n) {
  TargetSet ts;
  ts.indices.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) ts.indices[static_cast<std::size_t>(i)] = i;
  ts.selected.assign(static_cast<std::size_t>(n), 0);
  return ts;
}

namespace {

// Unit vector at a prescribed cosine to `base`, using `ortho_src` for the
// orthogonal component.
VectorD at_cosine(const VectorD& base, double cosine, Rng& rng) {
  const Index d = base.size();
  VectorD o = rng.gaussian_vector(d);
  o -= o.dot(base) * base;
  double norm = o.norm();
  while (norm < 1e-9) {
    o = rng.gaussian_vector(d);
    o -= o.dot(base) * base;
    norm = o.norm();
  }
  o /= norm;
  return cosine * base + std::sqrt(std::max(0.0, 1.0 - cosine * cosine)) * o;
}

}  // namespace

WitnessFixture make_witness_fixture(std::uint64_t seed, Index n_targets, Index probes_per_target,
                                    Index n_background, Index d, double closeness) {
  if (n_targets < 1 || probes_per_target < 1 || d < 2) {
    throw ParameterError("make_witness_fixture: bad dimensions");
  }
  if (!(closeness > 0.0) || closeness >= 1.0) {
    throw ParameterError("make_witness_fixture: closeness must be in (0, 1)");
  }

  MatrixF targets(n_targets, d);
  MatrixF pool(n_targets * probes_per_target + n_background, d);

  for (Index t = 0; t < n_targets; ++t) {
    Rng rng = Rng::substream(seed, "wit.target", static_cast<std::uint64_t>(t));
    const VectorD dir = rng.unit_vector(d);
    targets.row(t) = dir.cast<float>();
    for (Index p = 0; p < probes_per_target; ++p) {
      Rng prng = Rng::substream(seed, "wit.probe", static_cast<std::uint64_t>(t * probes_per_target + p));
      // Probe sits at cosine ~ closeness to its own target, far from others.
      const VectorD probe = at_cosine(dir, closeness, prng);
      pool.row(t * probes_per_target + p) = (probe / probe.norm()).cast<float>();
    }
  }
  for (Index b = 0; b < n_background; ++b) {
    Rng rng = Rng::substream(seed, "wit.bg", static_cast<std::uint64_t>(b));
    pool.row(n_targets * probes_per_target + b) = rng.unit_vector(d).cast<float>();
  }

  WitnessFixture fx;
  fx.pool.data = std::move(pool);
  fx.pool.row_norm = true;
  fx.targets.data = std::move(targets);
  fx.targets.row_norm = true;
  return fx;
}

HubFixture make_hub_fixture(std::uint64_t seed, Index n_hubs, Index shielded_per_hub,
                            Index probes_per_hub, Index d) {
  if (n_hubs < 1 || shielded_per_hub < 1 || probes_per_hub < 1 || d < 3) {
    throw ParameterError("make_hub_fixture: bad dimensions");
  }

  const Index n_targets = n_hubs * (1 + shielded_per_hub);
  MatrixF targets(n_targets, d);
  MatrixF pool(n_hubs * probes_per_hub, d);

  // Probes sit at cosine 0.95 to their hub; shielded targets at cosine 0.90
  // to the probes' center direction, strictly behind the hub for every probe
  // but ahead of anything else once the hub is gone.
  for (Index h = 0; h < n_hubs; ++h) {
    Rng hrng = Rng::substream(seed, "hub.dir", static_cast<std::uint64_t>(h));
    const VectorD hub = hrng.unit_vector(d);
    targets.row(h) = hub.cast<float>();

    for (Index p = 0; p < probes_per_hub; ++p) {
      Rng prng = Rng::substream(seed, "hub.probe", static_cast<std::uint64_t>(h * probes_per_hub + p));
      const VectorD probe = at_cosine(hub, 0.95, prng);
      pool.row(h * probes_per_hub + p) = (probe / probe.norm()).cast<float>();
    }
    for (Index s = 0; s < shielded_per_hub; ++s) {
      Rng srng = Rng::substream(seed, "hub.shield", static_cast<std::uint64_t>(h * shielded_per_hub + s));
      const VectorD sh = at_cosine(hub, 0.82, srng);
      targets.row(n_hubs + h * shielded_per_hub + s) = (sh / sh.norm()).cast<float>();
    }
  }

  HubFixture fx;
  fx.pool.data = std::move(pool);
  fx.pool.row_norm = true;
  fx.targets.data = std::move(targets);
  fx.targets.row_norm = true;
  fx.n_hubs = n_hubs;
  return fx;
}

}  // namespace curmi
