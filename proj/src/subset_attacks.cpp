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

#include "curmi/subset_attacks.hpp"

#include <algorithm>
#include <cmath>

namespace curmi {

namespace {

double bernoulli_llr(double mu_in, double mu_out, int x, double clamp) {
  const double pi = std::clamp(mu_in, clamp, 1.0 - clamp);
  const double po = std::clamp(mu_out, clamp, 1.0 - clamp);
  return x == 1 ? std::log(pi / po) : std::log((1.0 - pi) / (1.0 - po));
}

void check_mask_input(const ShadowEnsemble& ensemble, const std::vector<std::uint8_t>& observed) {
  if (observed.size() != static_cast<std::size_t>(ensemble.pool_size())) {
    throw ParameterError("binary_lira: observed mask length mismatch");
  }
}

void check_clamp(double clamp) {
  if (!(clamp > 0.0) || !(clamp < 0.5)) {
    throw ParameterError("binary_lira: clamp must be in (0, 0.5)");
  }
}

// Interpolated quantile (q in [0,1]) of a copy of the data.
double quantile(std::vector<double> v, double q) {
  const std::size_t n = v.size();
  const double pos = q * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, n - 1);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double vlo = v[lo];
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(hi), v.end());
  const double vhi = v[hi];
  return vlo + (pos - static_cast<double>(lo)) * (vhi - vlo);
}

// Soft-label ensemble: each shadow row passed through a sigmoid around that
// row's own selection threshold; temperature per pool column.
ShadowEnsemble soften(const ShadowEnsemble& ensemble, int k, double gamma, double temp) {
  const Index m = ensemble.shadows();
  const Index n_pool = ensemble.pool_size();

  VectorD temps(n_pool);
  if (temp > 0) {
    temps.setConstant(temp);
  } else {
    // Default: interquartile range of the column / 10, floored.
    std::vector<double> col(static_cast<std::size_t>(m));
    for (Index x = 0; x < n_pool; ++x) {
      for (Index j = 0; j < m; ++j) col[static_cast<std::size_t>(j)] = ensemble.outputs(j, x);
      const double iqr = quantile(col, 0.75) - quantile(col, 0.25);
      temps[x] = std::max(iqr / 10.0, 1e-9);
    }
  }

  ShadowEnsemble soft;
  soft.assignment = ensemble.assignment;
  soft.kind = EnsembleKind::kScores;
  soft.outputs.resize(m, n_pool);
  for (Index j = 0; j < m; ++j) {
    const double pi_k = top_k_threshold(ensemble.outputs.row(j).transpose(), k);
    for (Index x = 0; x < n_pool; ++x) {
      const double z = gamma * (ensemble.outputs(j, x) - pi_k) / temps[x];
      soft.outputs(j, x) = 1.0 / (1.0 + std::exp(-z));
    }
  }
  return soft;
}

}  // namespace

double binary_lira(const ShadowEnsemble& ensemble, const std::vector<std::uint8_t>& observed_mask,
                   Index target_id, double clamp) {
  if (ensemble.kind != EnsembleKind::kMasks) {
    throw ParameterError("binary_lira: ensemble must hold masks");
  }
  check_mask_input(ensemble, observed_mask);
  check_clamp(clamp);

  const InOutStats st = in_out_stats(ensemble, target_id);
  const Index k = select_kstar(st);
  return bernoulli_llr(st.mu_in[k], st.mu_out[k], observed_mask[static_cast<std::size_t>(k)] ? 1 : 0,
                       clamp);
}

AttackScores binary_lira_all(const ShadowEnsemble& ensemble,
                             const std::vector<std::uint8_t>& observed_mask, double clamp) {
  if (ensemble.kind != EnsembleKind::kMasks) {
    throw ParameterError("binary_lira: ensemble must hold masks");
  }
  check_mask_input(ensemble, observed_mask);
  check_clamp(clamp);

  const KstarTable table = kstar_table(ensemble);
  const Index n = ensemble.assignment.targets();
  AttackScores out;
  out.attack_name = "binary-lira";
  out.values.resize(n);
  for (Index t = 0; t < n; ++t) {
    const Index k = table.kstar[static_cast<std::size_t>(t)];
    out.values[t] = bernoulli_llr(table.mu_in[t], table.mu_out[t],
                                  observed_mask[static_cast<std::size_t>(k)] ? 1 : 0, clamp);
  }
  return out;
}

VectorD soft_binarize(const VectorD& shadow_scores, double pi_k, double gamma, double temp) {
  if (!(temp > 0)) throw ParameterError("soft_binarize: temp must be > 0");
  if (!(gamma > 0)) throw ParameterError("soft_binarize: gamma must be > 0");
  VectorD out(shadow_scores.size());
  for (Index i = 0; i < out.size(); ++i) {
    out[i] = 1.0 / (1.0 + std::exp(-gamma * (shadow_scores[i] - pi_k) / temp));
  }
  return out;
}

double binary_lira_soft(const ShadowEnsemble& ensemble, int k,
                        const std::vector<std::uint8_t>& observed_mask, Index target_id,
                        double gamma, double temp, double clamp) {
  if (ensemble.kind != EnsembleKind::kScores) {
    throw ParameterError("binary_lira_soft: ensemble must hold scores");
  }
  if (!(gamma > 0)) throw ParameterError("binary_lira_soft: gamma must be > 0");
  check_mask_input(ensemble, observed_mask);
  check_clamp(clamp);

  const ShadowEnsemble soft = soften(ensemble, k, gamma, temp);
  const InOutStats st = in_out_stats(soft, target_id);
  const Index kk = select_kstar(st);
  return bernoulli_llr(st.mu_in[kk], st.mu_out[kk],
                       observed_mask[static_cast<std::size_t>(kk)] ? 1 : 0, clamp);
}

AttackScores binary_lira_soft_all(const ShadowEnsemble& ensemble, int k,
                                  const std::vector<std::uint8_t>& observed_mask, double gamma,
                                  double temp, double clamp) {
  if (ensemble.kind != EnsembleKind::kScores) {
    throw ParameterError("binary_lira_soft: ensemble must hold scores");
  }
  if (!(gamma > 0)) throw ParameterError("binary_lira_soft: gamma must be > 0");
  check_mask_input(ensemble, observed_mask);
  check_clamp(clamp);

  const ShadowEnsemble soft = soften(ensemble, k, gamma, temp);
  const KstarTable table = kstar_table(soft);
  const Index n = ensemble.assignment.targets();
  AttackScores out;
  out.attack_name = "binary-lira-soft";
  out.values.resize(n);
  for (Index t = 0; t < n; ++t) {
    const Index kk = table.kstar[static_cast<std::size_t>(t)];
    out.values[t] = bernoulli_llr(table.mu_in[t], table.mu_out[t],
                                  observed_mask[static_cast<std::size_t>(kk)] ? 1 : 0, clamp);
  }
  return out;
}

double jaccard_similarity(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  if (a.size() != b.size()) throw ParameterError("jaccard: length mismatch");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool x = a[i] != 0, y = b[i] != 0;
    inter += (x && y);
    uni += (x || y);
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

IterativeVotingResult iterative_voting(const Curator& curator,
                                       const std::vector<std::uint8_t>& observed_mask,
                                       const IterativeVotingParams& params) {
  if (curator.method() != CurationMethod::kImageNN) {
    throw ParameterError("iterative_voting: image curation only");
  }
  if (observed_mask.size() != static_cast<std::size_t>(curator.pool_size())) {
    throw ParameterError("iterative_voting: observed mask length mismatch");
  }
  {
    std::size_t pop = 0;
    for (auto f : observed_mask) pop += (f != 0);
    if (pop != static_cast<std::size_t>(curator.k())) {
      throw ParameterError("iterative_voting: observed mask popcount must equal k");
    }
  }
  if (!(params.theta > 0.0) || params.theta > 1.0) {
    throw ParameterError("iterative_voting: theta must be in (0, 1]");
  }

  const Index n = curator.target_count();
  const MatrixD& table = curator.table();

  IterativeVotingResult res;
  res.trace.votes = VectorD::Zero(n);
  VectorD& votes = res.trace.votes;

  // Start from the full target set; targets whose cumulative vote turns
  // negative are removed permanently.
  std::vector<int> hypothesis = all_positions(n);
  std::vector<double> j_history;

  for (int iter = 0; iter < params.max_iters; ++iter) {
    const CurationResult cur = curator.run(hypothesis);
    const double j = jaccard_similarity(cur.mask, observed_mask);

    IterationRecord rec;
    rec.iteration = iter;
    rec.hypothesis_size = static_cast<Index>(hypothesis.size());

    // Overweighted: selected by the hypothesis but not observed.
    // Underweighted: observed but missed by the hypothesis.
    std::vector<Index> over, under;
    for (Index x = 0; x < curator.pool_size(); ++x) {
      const bool mine = cur.mask[static_cast<std::size_t>(x)] != 0;
      const bool theirs = observed_mask[static_cast<std::size_t>(x)] != 0;
      if (mine && !theirs) over.push_back(x);
      if (!mine && theirs) under.push_back(x);
    }
    rec.overweighted = static_cast<Index>(over.size());
    rec.underweighted = static_cast<Index>(under.size());
    rec.jaccard = j;
    res.trace.records.push_back(rec);

    if (j >= params.theta) {
      res.trace.converged = true;
      break;
    }

    // Attribute each differing pool sample to its nearest hypothesis target.
    auto nearest = [&](Index x) {
      int best = hypothesis[0];
      double best_sim = table(x, best);
      for (std::size_t c = 1; c < hypothesis.size(); ++c) {
        const double sim = table(x, hypothesis[c]);
        if (sim > best_sim) {
          best_sim = sim;
          best = hypothesis[c];
        }
      }
      return best;
    };
    for (Index x : under) votes[nearest(x)] += 1.0;
    for (Index x : over) votes[nearest(x)] -= 1.0;

    std::vector<int> next;
    next.reserve(hypothesis.size());
    for (int t : hypothesis) {
      if (votes[t] >= 0.0) next.push_back(t);
    }
    if (next.empty()) break;  // nothing left to hypothesize
    hypothesis = std::move(next);

    j_history.push_back(j);
    const auto h = j_history.size();
    if (h > static_cast<std::size_t>(params.patience) &&
        j_history[h - 1] - j_history[h - 1 - static_cast<std::size_t>(params.patience)] <
            params.epsilon) {
      break;  // stalled
    }
  }

  res.scores.attack_name = "iterative-voting";
  res.scores.values = votes;
  return res;
}

}  // namespace curmi
