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

#include "curmi/shadow.hpp"

#include <algorithm>
#include <cmath>

#include "curmi/rng.hpp"

namespace curmi {

std::vector<int> ShadowAssignment::row_positions(Index shadow) const {
  std::vector<int> out;
  for (Index t = 0; t < targets(); ++t) {
    if (membership(shadow, t) != 0.0f) out.push_back(static_cast<int>(t));
  }
  return out;
}

ShadowAssignment build_assignment(Index n_targets, Index m_shadows, std::uint64_t seed) {
  if (n_targets < 1) throw ParameterError("build_assignment: need at least one target");
  if (m_shadows < 2 || m_shadows % 2 != 0) {
    throw ParameterError("build_assignment: m must be even and >= 2");
  }

  MatrixF m = MatrixF::Zero(m_shadows, n_targets);
  const auto half = static_cast<std::size_t>(m_shadows / 2);
  // Column-wise balanced sampling: each target lands in a uniform random
  // half of the shadows, independently per target.
  std::vector<Index> rows(static_cast<std::size_t>(m_shadows));
  for (Index t = 0; t < n_targets; ++t) {
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<Index>(i);
    Rng rng = Rng::substream(seed, "shadow.col", static_cast<std::uint64_t>(t));
    for (std::size_t i = 0; i < half; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(rows.size() - i));
      std::swap(rows[i], rows[j]);
      m(rows[i], t) = 1.0f;
    }
  }
  ShadowAssignment a;
  a.membership = std::move(m);
  return a;
}

ShadowEnsemble run_shadows(const Curator& curator, const ShadowAssignment& assignment,
                           EnsembleKind kind) {
  if (assignment.targets() != curator.target_count()) {
    throw ParameterError("run_shadows: assignment width must match target count");
  }

  ShadowEnsemble e;
  e.kind = kind;
  e.outputs.resize(assignment.shadows(), curator.pool_size());
  for (Index j = 0; j < assignment.shadows(); ++j) {
    const std::vector<int> sel = assignment.row_positions(j);
    if (sel.empty()) {
      throw ParameterError("run_shadows: shadow " + std::to_string(j) + " has an empty subset");
    }
    if (kind == EnsembleKind::kScores) {
      e.outputs.row(j) = curator.scores(sel).transpose();
    } else {
      const CurationResult r = curator.run(sel);
      for (Index x = 0; x < curator.pool_size(); ++x) {
        e.outputs(j, x) = r.mask[static_cast<std::size_t>(x)] ? 1.0 : 0.0;
      }
    }
  }
  e.assignment = assignment;
  return e;
}

InOutStats in_out_stats(const ShadowEnsemble& ensemble, Index target_id) {
  const Index m = ensemble.shadows();
  const Index n_pool = ensemble.pool_size();
  if (target_id < 0 || target_id >= ensemble.assignment.targets()) {
    throw ParameterError("in_out_stats: target out of range");
  }

  InOutStats st;
  st.target_id = target_id;
  st.mu_in = VectorD::Zero(n_pool);
  st.mu_out = VectorD::Zero(n_pool);
  VectorD sq_in = VectorD::Zero(n_pool);
  VectorD sq_out = VectorD::Zero(n_pool);
  Index c_in = 0, c_out = 0;

  for (Index j = 0; j < m; ++j) {
    const auto row = ensemble.outputs.row(j);
    if (ensemble.assignment.contains(j, target_id)) {
      st.mu_in += row.transpose();
      sq_in += row.cwiseProduct(row).transpose();
      ++c_in;
    } else {
      st.mu_out += row.transpose();
      sq_out += row.cwiseProduct(row).transpose();
      ++c_out;
    }
  }
  if (c_in == 0 || c_out == 0) {
    throw ParameterError("in_out_stats: target must appear in and out of shadows");
  }

  st.mu_in /= static_cast<double>(c_in);
  st.mu_out /= static_cast<double>(c_out);
  sq_in /= static_cast<double>(c_in);
  sq_out /= static_cast<double>(c_out);
  // Population variance; clamp tiny negatives from cancellation.
  st.sigma_in = (sq_in - st.mu_in.cwiseProduct(st.mu_in)).cwiseMax(0.0).cwiseSqrt();
  st.sigma_out = (sq_out - st.mu_out.cwiseProduct(st.mu_out)).cwiseMax(0.0).cwiseSqrt();
  return st;
}

Index select_kstar(const InOutStats& stats) {
  Index best = 0;
  double best_diff = -1.0;
  for (Index k = 0; k < stats.mu_in.size(); ++k) {
    const double diff = std::abs(stats.mu_in[k] - stats.mu_out[k]);
    if (diff > best_diff) {
      best_diff = diff;
      best = k;
    }
  }
  return best;
}

KstarTable kstar_table(const ShadowEnsemble& ensemble) {
  const Index m = ensemble.shadows();
  const Index n = ensemble.assignment.targets();
  const Index n_pool = ensemble.pool_size();
  const double half = static_cast<double>(m) / 2.0;

  const MatrixD& e = ensemble.outputs;
  const MatrixD e2 = e.cwiseProduct(e);
  const MatrixD a = ensemble.assignment.membership.cast<double>();
  const VectorD col_sum = e.colwise().sum().transpose();
  const VectorD col_sq_sum = e2.colwise().sum().transpose();

  KstarTable out;
  out.kstar.resize(static_cast<std::size_t>(n));
  out.mu_in.resize(n);
  out.mu_out.resize(n);
  out.sigma_in.resize(n);
  out.sigma_out.resize(n);

  // Blocked over targets: sums over in-rows come from A^T E in one product;
  // out-rows are the complement against the full column sums.
  constexpr Index kBlock = 128;
  for (Index t0 = 0; t0 < n; t0 += kBlock) {
    const Index bn = std::min(kBlock, n - t0);
    const MatrixD at = a.middleCols(t0, bn).transpose();      // bn x m
    const MatrixD sum_in = at * e;                            // bn x n_pool
    const MatrixD sq_in = at * e2;                            // bn x n_pool

    for (Index b = 0; b < bn; ++b) {
      const Index t = t0 + b;
      Index best = 0;
      double best_diff = -1.0;
      for (Index x = 0; x < n_pool; ++x) {
        const double mu_in = sum_in(b, x) / half;
        const double mu_out = (col_sum[x] - sum_in(b, x)) / half;
        const double diff = std::abs(mu_in - mu_out);
        if (diff > best_diff) {
          best_diff = diff;
          best = x;
        }
      }
      const double mu_in = sum_in(b, best) / half;
      const double mu_out = (col_sum[best] - sum_in(b, best)) / half;
      const double var_in = std::max(0.0, sq_in(b, best) / half - mu_in * mu_in);
      const double var_out =
          std::max(0.0, (col_sq_sum[best] - sq_in(b, best)) / half - mu_out * mu_out);
      out.kstar[static_cast<std::size_t>(t)] = best;
      out.mu_in[t] = mu_in;
      out.mu_out[t] = mu_out;
      out.sigma_in[t] = std::sqrt(var_in);
      out.sigma_out[t] = std::sqrt(var_out);
    }
  }
  return out;
}

}  // namespace curmi
