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

#include "curmi/score_attacks.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace curmi {

namespace {

double gaussian_llr(double s, double mu_in, double sigma_in, double mu_out, double sigma_out) {
  const double var_in = std::max(sigma_in * sigma_in, kVarianceFloor);
  const double var_out = std::max(sigma_out * sigma_out, kVarianceFloor);
  const double ll_in = -0.5 * std::log(var_in) - (s - mu_in) * (s - mu_in) / (2.0 * var_in);
  const double ll_out = -0.5 * std::log(var_out) - (s - mu_out) * (s - mu_out) / (2.0 * var_out);
  return ll_in - ll_out;
}

}  // namespace

double lira_gaussian(const ShadowEnsemble& ensemble, const VectorD& observed_scores,
                     Index target_id) {
  if (ensemble.kind != EnsembleKind::kScores) {
    throw ParameterError("lira_gaussian: ensemble must hold scores");
  }
  if (observed_scores.size() != ensemble.pool_size()) {
    throw ParameterError("lira_gaussian: observed score length mismatch");
  }
  const InOutStats st = in_out_stats(ensemble, target_id);
  const Index k = select_kstar(st);
  return gaussian_llr(observed_scores[k], st.mu_in[k], st.sigma_in[k], st.mu_out[k],
                      st.sigma_out[k]);
}

AttackScores lira_gaussian_all(const ShadowEnsemble& ensemble, const VectorD& observed_scores) {
  if (ensemble.kind != EnsembleKind::kScores) {
    throw ParameterError("lira_gaussian: ensemble must hold scores");
  }
  if (observed_scores.size() != ensemble.pool_size()) {
    throw ParameterError("lira_gaussian: observed score length mismatch");
  }
  const KstarTable table = kstar_table(ensemble);
  const Index n = ensemble.assignment.targets();

  AttackScores out;
  out.attack_name = "lira";
  out.values.resize(n);
  for (Index t = 0; t < n; ++t) {
    const Index k = table.kstar[static_cast<std::size_t>(t)];
    out.values[t] = gaussian_llr(observed_scores[k], table.mu_in[t], table.sigma_in[t],
                                 table.mu_out[t], table.sigma_out[t]);
  }
  clamp_scores(out.values);
  return out;
}

AttackScores voting_image(const EmbeddingMatrix& pool, const EmbeddingMatrix& targets,
                          const VectorD& observed_scores, double tol) {
  if (!(tol > 0)) throw ParameterError("voting_image: tol must be > 0");
  const MatrixD table = similarity_table(pool, targets);
  if (observed_scores.size() != table.rows()) {
    throw ParameterError("voting_image: observed score length mismatch");
  }
  const Index n = table.cols();

  AttackScores out;
  out.attack_name = "voting";
  out.values = VectorD::Zero(n);
  for (Index x = 0; x < table.rows(); ++x) {
    const double s = observed_scores[x];
    Index best = 0;
    double best_gap = std::abs(table(x, 0) - s);
    for (Index t = 1; t < n; ++t) {
      const double gap = std::abs(table(x, t) - s);
      if (gap < best_gap) {
        best_gap = gap;
        best = t;
      }
    }
    for (Index t = 0; t < n; ++t) {
      if (t == best && best_gap <= tol) {
        out.values[t] += 1.0;
      } else if (table(x, t) > s + tol) {
        out.values[t] -= 1.0;
      }
    }
  }
  return out;
}

LeastSquaresResult least_squares_trak(const TrakSystem& sys, const GradientMatrix& target_grads,
                                      const VectorD& observed_scores) {
  if (target_grads.dim() != sys.dim()) {
    throw ParameterError("least_squares_trak: d_proj mismatch");
  }
  if (observed_scores.size() != sys.pool_size()) {
    throw ParameterError("least_squares_trak: observed score length mismatch");
  }

  // The adversary knows the curation algorithm, hence q; divide it out
  // before solving in feature space. The N x n product matrix is never
  // materialized: multiplying through by Phi^T reduces the system to
  // d_proj x n.
  const VectorD s = observed_scores.cwiseQuotient(sys.q);
  const Index n = target_grads.rows();
  const MatrixD y_t = target_grads.data.cast<double>().transpose();   // d_proj x n
  const MatrixD gram_phi = sys.phi.transpose() * sys.phi;             // d_proj x d_proj
  const MatrixD a = gram_phi * y_t;                                   // d_proj x n
  const VectorD b = sys.phi.transpose() * s;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorD m = svd.solve(b);

  LeastSquaresResult res;
  res.scores.attack_name = "lstsq";
  res.scores.values = m;
  clamp_scores(res.scores.values);
  res.residual = (a * m - b).norm();
  res.b_norm = b.norm();
  res.degenerate = svd.rank() < std::min(a.rows(), a.cols());
  return res;
}

SparseRecovery omp_recover(const MatrixD& a, const VectorD& b, int sparsity) {
  const Index rows = a.rows();
  const Index cols = a.cols();
  if (b.size() != rows) throw ParameterError("omp_recover: size mismatch");
  if (sparsity < 0 || sparsity > std::min(rows, cols)) {
    throw ParameterError("omp_recover: sparsity out of range");
  }

  VectorD col_norms(cols);
  for (Index j = 0; j < cols; ++j) col_norms[j] = std::max(a.col(j).norm(), 1e-300);

  SparseRecovery rec;
  rec.weights = VectorD::Zero(cols);
  VectorD residual = b;
  const double stop = 1e-12 * std::max(1.0, b.norm());
  std::vector<char> used(static_cast<std::size_t>(cols), 0);

  for (int step = 0; step < sparsity; ++step) {
    if (residual.norm() <= stop) break;

    Index best = -1;
    double best_corr = -1.0;
    for (Index j = 0; j < cols; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double corr = std::abs(a.col(j).dot(residual)) / col_norms[j];
      if (corr > best_corr) {
        best_corr = corr;
        best = j;
      }
    }
    if (best < 0) break;
    used[static_cast<std::size_t>(best)] = 1;
    rec.support.push_back(best);
    std::sort(rec.support.begin(), rec.support.end());

    MatrixD sub(rows, static_cast<Index>(rec.support.size()));
    for (std::size_t c = 0; c < rec.support.size(); ++c) sub.col(static_cast<Index>(c)) = a.col(rec.support[c]);
    const VectorD x = sub.colPivHouseholderQr().solve(b);
    rec.weights.setZero();
    for (std::size_t c = 0; c < rec.support.size(); ++c) rec.weights[rec.support[c]] = x[static_cast<Index>(c)];
    residual = b - sub * x;
  }
  rec.residual = residual.norm();
  return rec;
}

SparseRecovery iht_recover(const MatrixD& a, const VectorD& b, int sparsity, int iters,
                           double step) {
  const Index cols = a.cols();
  if (b.size() != a.rows()) throw ParameterError("iht_recover: size mismatch");
  if (sparsity < 0 || sparsity > cols) throw ParameterError("iht_recover: sparsity out of range");
  if (iters < 1) throw ParameterError("iht_recover: iters must be >= 1");

  if (step <= 0) {
    // 1 / sigma_max(A)^2 estimated by 20 power iterations on A^T A.
    VectorD v = VectorD::Ones(cols).normalized();
    double lambda = 1.0;
    for (int i = 0; i < 20; ++i) {
      VectorD w = a.transpose() * (a * v);
      lambda = w.norm();
      if (lambda < 1e-300) break;
      v = w / lambda;
    }
    step = lambda > 1e-300 ? 1.0 / lambda : 1.0;
  }

  VectorD x = VectorD::Zero(cols);
  const double r0 = b.norm();
  SparseRecovery rec;

  std::vector<Index> order(static_cast<std::size_t>(cols));
  for (int it = 0; it < iters; ++it) {
    VectorD g = x + step * (a.transpose() * (b - a * x));
    // H_k: keep the k largest magnitudes, ties to the lowest index.
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Index>(i);
    std::sort(order.begin(), order.end(), [&](Index p, Index q) {
      const double ap = std::abs(g[p]), aq = std::abs(g[q]);
      if (ap != aq) return ap > aq;
      return p < q;
    });
    x.setZero();
    for (int i = 0; i < sparsity; ++i) x[order[static_cast<std::size_t>(i)]] = g[order[static_cast<std::size_t>(i)]];

    const double r = (b - a * x).norm();
    if (r > 10.0 * std::max(r0, 1e-300)) {
      rec.diverged = true;
      break;
    }
  }

  for (Index j = 0; j < cols; ++j) {
    if (x[j] != 0.0) rec.support.push_back(j);
  }
  rec.weights = x;
  rec.residual = (b - a * x).norm();
  return rec;
}

namespace {

VectorD min_max_normalize(const VectorD& v) {
  const double lo = v.minCoeff();
  const double hi = v.maxCoeff();
  if (hi - lo < 1e-300) return VectorD::Constant(v.size(), 0.5);
  return (v.array() - lo) / (hi - lo);
}

}  // namespace

AttackScores combine_scores(const AttackScores& a, const AttackScores& b, double w) {
  if (a.values.size() != b.values.size()) {
    throw ParameterError("combine_scores: length mismatch");
  }
  if (w < 0.0 || w > 1.0) throw ParameterError("combine_scores: w must be in [0, 1]");
  AttackScores out;
  out.attack_name = "combined";
  out.values = w * min_max_normalize(a.values) + (1.0 - w) * min_max_normalize(b.values);
  out.labels = a.has_labels() ? a.labels : b.labels;
  return out;
}

}  // namespace curmi
