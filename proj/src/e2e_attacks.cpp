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

#include "curmi/e2e_attacks.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace curmi {

double percentile_rank(const VectorD& sorted_values, double v) {
  const Index n = sorted_values.size();
  if (n == 0) throw ParameterError("percentile_rank: empty distribution");
  if (n == 1) return v < sorted_values[0] ? 0.0 : (v > sorted_values[0] ? 100.0 : 50.0);
  if (v <= sorted_values[0]) return 0.0;
  if (v >= sorted_values[n - 1]) return 100.0;

  const double* begin = sorted_values.data();
  const double* it = std::upper_bound(begin, begin + n, v);
  const Index hi = static_cast<Index>(it - begin);  // first element > v
  const Index lo = hi - 1;
  const double span = sorted_values[hi] - sorted_values[lo];
  const double frac = span > 0 ? (v - sorted_values[lo]) / span : 0.0;
  return 100.0 * (static_cast<double>(lo) + frac) / static_cast<double>(n - 1);
}

double percentile_value(const VectorD& sorted_values, double p) {
  const Index n = sorted_values.size();
  if (n == 0) throw ParameterError("percentile_value: empty distribution");
  if (p <= 0) return sorted_values[0];
  if (p >= 100) return sorted_values[n - 1];
  const double pos = p / 100.0 * static_cast<double>(n - 1);
  const Index lo = static_cast<Index>(pos);
  const Index hi = std::min(lo + 1, n - 1);
  return sorted_values[lo] + (pos - static_cast<double>(lo)) * (sorted_values[hi] - sorted_values[lo]);
}

std::vector<Index> influence_counts(const EmbeddingMatrix& pool, const EmbeddingMatrix& targets) {
  const MatrixD table = similarity_table(pool, targets);
  std::vector<Index> counts(static_cast<std::size_t>(table.cols()), 0);
  for (Index x = 0; x < table.rows(); ++x) {
    Index best = 0;
    double best_sim = table(x, 0);
    for (Index t = 1; t < table.cols(); ++t) {
      if (table(x, t) > best_sim) {
        best_sim = table(x, t);
        best = t;
      }
    }
    ++counts[static_cast<std::size_t>(best)];
  }
  return counts;
}

FingerprintPlan craft_image_fingerprints(const EmbeddingMatrix& pool,
                                         const EmbeddingMatrix& targets, double alpha,
                                         Index k_nn) {
  if (alpha < 0.0 || alpha > 1.0) throw ParameterError("craft_image_fingerprints: alpha in [0,1]");
  if (k_nn < 1) throw ParameterError("craft_image_fingerprints: k_nn must be >= 1");
  const MatrixD table = similarity_table(pool, targets);
  const Index n_pool = table.rows();
  const Index n = table.cols();
  const Index knn = std::min(k_nn, n_pool);

  // Baseline pool scores against the full target set, for p0 percentiles.
  VectorD baseline(n_pool);
  for (Index x = 0; x < n_pool; ++x) baseline[x] = table.row(x).maxCoeff();
  VectorD sorted = baseline;
  std::sort(sorted.data(), sorted.data() + sorted.size());

  FingerprintPlan plan;
  plan.alpha = alpha;
  plan.mapping.resize(static_cast<std::size_t>(n));

  std::vector<Index> chosen(static_cast<std::size_t>(n));
  std::vector<Index> order(static_cast<std::size_t>(n_pool));
  for (Index t = 0; t < n; ++t) {
    // k_nn nearest pool candidates for this target (sim desc, index asc).
    std::iota(order.begin(), order.end(), Index{0});
    std::nth_element(order.begin(), order.begin() + (knn - 1), order.end(), [&](Index a, Index b) {
      if (table(a, t) != table(b, t)) return table(a, t) > table(b, t);
      return a < b;
    });

    Index best = -1;
    double best_score = -1e300;
    for (Index c = 0; c < knn; ++c) {
      const Index f = order[static_cast<std::size_t>(c)];
      double other = -1.0;
      for (Index t2 = 0; t2 < n; ++t2) {
        if (t2 != t) other = std::max(other, table(f, t2));
      }
      const double score = alpha * table(f, t) + (1.0 - alpha) * (1.0 - other);
      if (score > best_score || (score == best_score && f < best)) {
        best_score = score;
        best = f;
      }
    }
    chosen[static_cast<std::size_t>(t)] = best;
  }

  // Deduplicate fingerprints shared by several targets.
  for (Index t = 0; t < n; ++t) {
    const Index f = chosen[static_cast<std::size_t>(t)];
    auto it = std::find(plan.candidates.begin(), plan.candidates.end(), f);
    std::size_t pos;
    if (it == plan.candidates.end()) {
      pos = plan.candidates.size();
      plan.candidates.push_back(f);
      plan.inverse_counts.push_back(0);
      plan.baseline_percentile.push_back(percentile_rank(sorted, baseline[f]));
    } else {
      pos = static_cast<std::size_t>(it - plan.candidates.begin());
    }
    plan.mapping[static_cast<std::size_t>(t)] = static_cast<Index>(pos);
    ++plan.inverse_counts[pos];
  }
  return plan;
}

double image_selection_prob(double p0, double tau, double sharpness) {
  if (!(sharpness > 0)) throw ParameterError("image_selection_prob: sharpness must be > 0");
  return 1.0 / (1.0 + std::exp(-(p0 - tau) / sharpness));
}

AttackScores image_e2e_scores(const FingerprintPlan& plan,
                              const std::vector<std::uint8_t>& selections) {
  if (selections.size() != plan.candidates.size()) {
    throw ParameterError("image_e2e_scores: selections must cover every fingerprint");
  }
  const auto n = plan.mapping.size();
  AttackScores out;
  out.attack_name = "e2e-image";
  out.values = VectorD::Zero(static_cast<Index>(n));

  for (std::size_t t = 0; t < n; ++t) {
    const auto f = static_cast<std::size_t>(plan.mapping[t]);
    const double p_exp =
        image_selection_prob(plan.baseline_percentile[f], plan.tau, plan.sharpness);
    const double delta = selections[f] ? (1.0 - p_exp) : -p_exp;
    const double w = 1.0 / static_cast<double>(plan.inverse_counts[f]);
    // One fingerprint per target in this construction, so the average over
    // the fingerprint count is the single weighted surprise.
    out.values[static_cast<Index>(t)] = w * delta;
  }
  return out;
}

AttackScores oracle_attack_image(const EmbeddingMatrix& pool, const EmbeddingMatrix& targets,
                                 const VectorD& observed_scores, double tol) {
  if (!(tol > 0)) throw ParameterError("oracle_attack_image: tol must be > 0");
  const MatrixD table = similarity_table(pool, targets);
  if (observed_scores.size() != table.rows()) {
    throw ParameterError("oracle_attack_image: observed score length mismatch");
  }

  AttackScores out;
  out.attack_name = "oracle";
  out.values = VectorD::Constant(table.cols(), 0.5);
  for (Index t = 0; t < table.cols(); ++t) {
    bool explains = false;
    bool exceeds = false;
    for (Index x = 0; x < table.rows(); ++x) {
      const double gap = table(x, t) - observed_scores[x];
      if (std::abs(gap) <= tol) explains = true;
      if (gap > tol) exceeds = true;
    }
    if (explains) {
      out.values[t] = 1.0;
    } else if (exceeds) {
      out.values[t] = 0.0;
    }
  }
  return out;
}

std::pair<Index, Index> craft_image_canary(const EmbeddingMatrix& pool,
                                           const VectorD& observed_scores, double percentile_cap) {
  if (observed_scores.size() != pool.rows()) {
    throw ParameterError("craft_image_canary: observed score length mismatch");
  }
  VectorD sorted = observed_scores;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  const double cap = percentile_value(sorted, percentile_cap);

  std::vector<Index> low;
  for (Index i = 0; i < observed_scores.size(); ++i) {
    if (observed_scores[i] <= cap) low.push_back(i);
  }
  if (low.size() < 2) {
    throw NotFoundError("craft_image_canary: fewer than two low-scoring samples");
  }

  const MatrixD emb = pool.data.cast<double>();
  Index best_i = low[0], best_j = low[1];
  double best_sim = -2.0;
  for (std::size_t a = 0; a < low.size(); ++a) {
    for (std::size_t b = a + 1; b < low.size(); ++b) {
      const double sim = emb.row(low[a]).dot(emb.row(low[b]));
      if (sim > best_sim) {
        best_sim = sim;
        best_i = low[a];
        best_j = low[b];
      }
    }
  }
  return {best_i, best_j};
}

// --- TRAK fingerprinting ----------------------------------------------

TargetGradientModel estimate_target_model(const GradientMatrix& target_grads,
                                          bool force_diagonal) {
  const MatrixD y = target_grads.data.cast<double>();
  const Index n = y.rows();
  const Index d = y.cols();

  TargetGradientModel model;
  model.mu = y.colwise().mean().transpose();
  const MatrixD centered = y.rowwise() - model.mu.transpose();

  if (force_diagonal || d > kFullCovarianceMaxDim) {
    model.diagonal_only = true;
    VectorD var = centered.cwiseProduct(centered).colwise().mean().transpose();
    model.sigma = var.asDiagonal();
  } else {
    model.sigma = centered.transpose() * centered / static_cast<double>(n);
  }
  return model;
}

double sherman_morrison_score(const TrakSystem& sys, const VectorD& probe,
                              const VectorD& mean_target, double q_new) {
  if (probe.size() != sys.dim() || mean_target.size() != sys.dim()) {
    throw ParameterError("sherman_morrison_score: dimension mismatch");
  }
  const VectorD gp = sys.g_inv * probe;
  return q_new * probe.dot(sys.g_inv * mean_target) / (1.0 + probe.dot(gp));
}

double trak_snr(const TrakSystem& sys, const VectorD& probe, const VectorD& canary,
                const TargetGradientModel& model, double m_subset) {
  if (!(m_subset > 0)) throw ParameterError("trak_snr: m must be > 0");
  const VectorD gp = sys.g_inv * probe;
  const double signal = std::abs(gp.dot(canary));
  const double nu2 = std::max(gp.dot(model.sigma * gp), 1e-18);
  return signal / std::sqrt(m_subset * nu2);
}

namespace {

struct FingerprintStats {
  MatrixD signal;       // |F| x n
  VectorD noise;        // nu_i per fingerprint
  std::vector<Index> best;
  VectorD best_snr;     // per target
  bool sigma_degenerate = false;
};

FingerprintStats fingerprint_stats(const TrakSystem& sys, const GradientMatrix& target_grads,
                                   const MatrixD& candidates, const TargetGradientModel& model_in) {
  if (candidates.rows() < 1) throw ParameterError("fingerprints: need at least one candidate");
  if (candidates.cols() != sys.dim() || target_grads.dim() != sys.dim()) {
    throw ParameterError("fingerprints: dimension mismatch");
  }

  TargetGradientModel model = model_in;
  FingerprintStats st;
  // A covariance whose Cholesky fails (rank-collapsed target set) falls back
  // to its diagonal.
  if (!model.diagonal_only) {
    Eigen::LLT<Eigen::MatrixXd> llt(model.sigma);
    if (llt.info() != Eigen::Success) {
      VectorD d = model.sigma.diagonal();
      model.sigma = d.asDiagonal();
      model.diagonal_only = true;
      st.sigma_degenerate = true;
    }
  }

  const Index f = candidates.rows();
  const Index n = target_grads.rows();
  const MatrixD gf = candidates * sys.g_inv;  // |F| x d  (G^-1 symmetric)
  st.signal = gf * target_grads.data.cast<double>().transpose();
  st.noise.resize(f);
  for (Index i = 0; i < f; ++i) {
    const double nu2 = (gf.row(i) * model.sigma).dot(gf.row(i));
    st.noise[i] = std::sqrt(std::max(nu2, 1e-18));
  }

  st.best.resize(static_cast<std::size_t>(n));
  st.best_snr.resize(n);
  for (Index j = 0; j < n; ++j) {
    Index best = 0;
    double best_snr = -1.0;
    for (Index i = 0; i < f; ++i) {
      const double snr = std::abs(st.signal(i, j)) / st.noise[i];
      if (snr > best_snr) {
        best_snr = snr;
        best = i;
      }
    }
    st.best[static_cast<std::size_t>(j)] = best;
    st.best_snr[j] = best_snr;
  }
  return st;
}

}  // namespace

TrakFingerprintPlan craft_trak_fingerprints(const TrakSystem& sys,
                                            const GradientMatrix& target_grads,
                                            const MatrixD& candidate_grads,
                                            const TargetGradientModel& model) {
  const FingerprintStats st = fingerprint_stats(sys, target_grads, candidate_grads, model);
  TrakFingerprintPlan plan;
  plan.fingerprints = candidate_grads;
  plan.best = st.best;
  plan.noise_scales = st.noise;
  plan.confidences = st.best_snr;
  plan.signal = st.signal;
  plan.sigma_degenerate = st.sigma_degenerate;
  return plan;
}

AttackScores trak_e2e_attack(const TrakSystem& sys, const GradientMatrix& target_grads,
                             const MatrixD& fingerprints, double rho,
                             const std::vector<std::uint8_t>& observed_selection, int k,
                             const TrakE2eOptions& opts) {
  if (!(rho > 0.0) || !(rho < 100.0)) throw ParameterError("trak_e2e_attack: rho in (0, 100)");
  const Index n_pool = sys.pool_size();
  const Index n_f = fingerprints.rows();
  const Index n = target_grads.rows();
  if (observed_selection.size() != static_cast<std::size_t>(n_pool + n_f)) {
    throw ParameterError("trak_e2e_attack: selection mask must cover pool + fingerprints");
  }
  {
    std::size_t pop = 0;
    for (auto f : observed_selection) pop += (f != 0);
    if (k > 0 && pop != static_cast<std::size_t>(k)) {
      throw ParameterError("trak_e2e_attack: selection popcount must equal k");
    }
  }

  const TargetGradientModel model = estimate_target_model(target_grads);
  const FingerprintStats st = fingerprint_stats(sys, target_grads, fingerprints, model);

  const double m = opts.assumed_m > 0 ? opts.assumed_m : std::max(1.0, static_cast<double>(n) / 2.0);
  const double q_new = opts.q_new > 0 ? opts.q_new : sys.q.mean();

  // Percentiles are measured against the adversary's baseline score model:
  // the pool scored against the full-target mean gradient.
  VectorD base = (sys.phi * model.mu).cwiseProduct(sys.q);
  std::sort(base.data(), base.data() + base.size());

  AttackScores out;
  out.attack_name = "e2e-trak";
  out.values = VectorD::Zero(n);
  for (Index j = 0; j < n; ++j) {
    const Index i = st.best[static_cast<std::size_t>(j)];
    const VectorD f = fingerprints.row(i).transpose();
    const VectorD y_j = target_grads.data.row(j).cast<double>().transpose();

    const double z_h0 = sherman_morrison_score(sys, f, model.mu, q_new);
    const double z_h1 = sherman_morrison_score(sys, f, model.mu + y_j / m, q_new);
    const double p_h0 = percentile_rank(base, z_h0);
    const double p_h1 = percentile_rank(base, z_h1);
    const double confidence =
        std::abs(std::clamp(p_h1, rho, 100.0) - std::clamp(p_h0, rho, 100.0));

    const bool selected = observed_selection[static_cast<std::size_t>(n_pool + i)] != 0;
    if (selected && p_h1 > rho && p_h0 <= rho) {
      out.values[j] = confidence;
    }
  }
  return out;
}

}  // namespace curmi
