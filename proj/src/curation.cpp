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

#include "curmi/curation.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <numeric>

#include "curmi/rng.hpp"

namespace curmi {

double default_trak_lambda(const GradientMatrix& pool_grads) {
  const MatrixD x = pool_grads.data.cast<double>();
  const double trace = x.colwise().squaredNorm().sum();
  return 1e-3 * trace / static_cast<double>(x.cols());
}

TrakSystem trak_features(const GradientMatrix& pool_grads, double lambda) {
  if (!(lambda > 0)) throw ParameterError("trak_features: lambda must be > 0");
  if (pool_grads.rows() < 1) throw ParameterError("trak_features: empty pool");
  if (pool_grads.q.size() != pool_grads.rows()) {
    throw ParameterError("trak_features: q length must equal pool rows");
  }

  const MatrixD x = pool_grads.data.cast<double>();
  MatrixD gram = x.transpose() * x;
  gram.diagonal().array() += lambda;

  if (!gram.allFinite()) throw NumericError("trak_features: non-finite Gram matrix");
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NumericError("trak_features: Cholesky factorization failed");
  }

  TrakSystem sys;
  sys.g_inv = llt.solve(Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
  sys.phi = x * sys.g_inv;
  sys.q = pool_grads.q;
  sys.lambda = lambda;
  return sys;
}

MatrixD similarity_table(const EmbeddingMatrix& pool, const EmbeddingMatrix& targets) {
  if (pool.dim() != targets.dim()) {
    throw ParameterError("similarity table: dimension mismatch");
  }
  if (targets.rows() < 1) throw ParameterError("similarity table: empty target set");
  if (!pool.row_norm || !targets.row_norm) {
    throw ParameterError("similarity table: embeddings must be row-normalized");
  }
  return pool.data.cast<double>() * targets.data.cast<double>().transpose();
}

namespace {

VectorD max_over_columns(const MatrixD& table, std::span<const int> cols) {
  VectorD out(table.rows());
  for (Index i = 0; i < table.rows(); ++i) {
    double best = table(i, cols[0]);
    for (std::size_t c = 1; c < cols.size(); ++c) {
      best = std::max(best, table(i, cols[c]));
    }
    out[i] = best;
  }
  return out;
}

}  // namespace

VectorD image_scores(const EmbeddingMatrix& pool, const EmbeddingMatrix& targets) {
  const MatrixD table = similarity_table(pool, targets);
  const std::vector<int> cols = all_positions(targets.rows());
  return quantize_f32(max_over_columns(table, cols));
}

VectorD trak_scores(const TrakSystem& sys, const GradientMatrix& target_grads,
                    std::span<const int> selected) {
  if (target_grads.dim() != sys.dim()) {
    throw ParameterError("trak_scores: d_proj mismatch");
  }
  if (selected.empty()) throw ParameterError("trak_scores: empty selection");
  for (int s : selected) {
    if (s < 0 || s >= target_grads.rows()) throw ParameterError("trak_scores: index out of range");
  }

  VectorD mean = VectorD::Zero(sys.dim());
  for (int s : selected) mean += target_grads.data.row(s).cast<double>();
  mean /= static_cast<double>(selected.size());

  VectorD scores = (sys.phi * mean).cwiseProduct(sys.q);
  return quantize_f32(scores);
}

std::vector<std::uint8_t> top_k_select(const VectorD& scores, int k) {
  const Index n = scores.size();
  if (k < 1 || k > n) throw ParameterError("top_k_select: k out of range");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  // Full order: score descending, index ascending on ties.
  std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), [&](Index a, Index b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });

  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < k; ++i) mask[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;
  return mask;
}

double top_k_threshold(const VectorD& scores, int k) {
  const Index n = scores.size();
  if (k < 1 || k > n) throw ParameterError("top_k_threshold: k out of range");
  std::vector<double> v(scores.data(), scores.data() + n);
  std::nth_element(v.begin(), v.begin() + (k - 1), v.end(), std::greater<double>());
  return v[static_cast<std::size_t>(k - 1)];
}

GradientMatrix project_gradients(const GradientMatrix& raw, std::uint64_t seed, Index d_proj) {
  if (d_proj < 1) throw ParameterError("project_gradients: d_proj must be >= 1");
  const Index d_in = raw.dim();
  MatrixD p(d_in, d_proj);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_proj));
  Rng rng = Rng::substream(seed, "proj");
  for (Index i = 0; i < d_in; ++i) {
    for (Index j = 0; j < d_proj; ++j) {
      p(i, j) = (rng.next_u64() & 1) ? scale : -scale;
    }
  }
  GradientMatrix out;
  out.data = (raw.data.cast<double>() * p).cast<float>();
  out.q = raw.q;
  return out;
}

// --- Curator -----------------------------------------------------------

Curator Curator::image(EmbeddingMatrix pool, EmbeddingMatrix targets, int k) {
  Curator c;
  c.method_ = CurationMethod::kImageNN;
  c.table_ = similarity_table(pool, targets);
  if (k < 1 || k > c.table_.rows()) throw ParameterError("curator: k out of range");
  c.k_ = k;
  return c;
}

Curator Curator::trak(TrakSystem sys, GradientMatrix target_grads, int k) {
  if (target_grads.dim() != sys.dim()) throw ParameterError("curator: d_proj mismatch");
  Curator c;
  c.method_ = CurationMethod::kTrak;
  if (k < 1 || k > sys.pool_size()) throw ParameterError("curator: k out of range");
  c.k_ = k;
  c.sys_ = std::move(sys);
  c.target_grads_ = std::move(target_grads);
  return c;
}

Index Curator::pool_size() const {
  return method_ == CurationMethod::kImageNN ? table_.rows() : sys_.pool_size();
}

Index Curator::target_count() const {
  return method_ == CurationMethod::kImageNN ? table_.cols() : target_grads_.rows();
}

const MatrixD& Curator::table() const {
  if (method_ != CurationMethod::kImageNN) {
    throw ParameterError("curator: similarity table exists only in image mode");
  }
  return table_;
}

VectorD Curator::scores(std::span<const int> selected) const {
  if (selected.empty()) throw ParameterError("curator: empty target selection");
  if (method_ == CurationMethod::kImageNN) {
    for (int s : selected) {
      if (s < 0 || s >= table_.cols()) throw ParameterError("curator: index out of range");
    }
    return quantize_f32(max_over_columns(table_, selected));
  }
  return trak_scores(sys_, target_grads_, selected);
}

CurationResult Curator::run(std::span<const int> selected) const {
  CurationResult res;
  res.scores = scores(selected);
  res.mask = top_k_select(res.scores, k_);
  res.k = k_;
  res.method = method_;
  return res;
}

std::vector<int> all_positions(Index n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace curmi
