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

#include "curmi/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "curmi/curation.hpp"
#include "curmi/rng.hpp"
#include "curmi/score_attacks.hpp"
#include "curmi/shadow.hpp"
#include "curmi/subset_attacks.hpp"
#include "curmi/synthetic.hpp"
#include "curmi/e2e_attacks.hpp"

namespace curmi {

RocCurve roc_curve(const AttackScores& scores) {
  if (!scores.has_labels()) throw ParameterError("roc_curve: labels required");
  return roc_curve(scores.values, scores.labels);
}

RocCurve roc_curve(const VectorD& values, const std::vector<std::uint8_t>& labels) {
  const Index n = values.size();
  if (labels.size() != static_cast<std::size_t>(n)) {
    throw ParameterError("roc_curve: label length mismatch");
  }
  Index pos = 0, neg = 0;
  for (auto l : labels) (l ? pos : neg) += 1;
  if (pos == 0 || neg == 0) {
    throw ParameterError("roc_curve: both classes must be present");
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return values[a] > values[b]; });

  RocCurve roc;
  roc.fpr.push_back(0.0);
  roc.tpr.push_back(0.0);

  Index tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    // Group ties: admit every sample sharing this threshold at once.
    const double thr = values[order[i]];
    while (i < order.size() && values[order[i]] == thr) {
      (labels[static_cast<std::size_t>(order[i])] ? tp : fp) += 1;
      ++i;
    }
    roc.thresholds.push_back(thr);
    roc.fpr.push_back(static_cast<double>(fp) / static_cast<double>(neg));
    roc.tpr.push_back(static_cast<double>(tp) / static_cast<double>(pos));
  }

  double auc = 0.0;
  for (std::size_t p = 1; p < roc.fpr.size(); ++p) {
    auc += (roc.fpr[p] - roc.fpr[p - 1]) * (roc.tpr[p] + roc.tpr[p - 1]) / 2.0;
  }
  roc.auc = auc;
  return roc;
}

double tpr_at_fpr(const VectorD& values, const std::vector<std::uint8_t>& labels,
                  double fpr_budget) {
  if (!(fpr_budget > 0.0) || !(fpr_budget < 1.0)) {
    throw ParameterError("tpr_at_fpr: budget must be in (0, 1)");
  }
  const RocCurve roc = roc_curve(values, labels);
  double best = 0.0;
  for (std::size_t i = 0; i < roc.fpr.size(); ++i) {
    if (roc.fpr[i] <= fpr_budget) best = std::max(best, roc.tpr[i]);
  }
  return best;
}

// --- composite experiments ----------------------------------------------

std::string to_string(PipelineAttack a) {
  switch (a) {
    case PipelineAttack::kLira: return "lira";
    case PipelineAttack::kVoting: return "voting";
    case PipelineAttack::kOracle: return "oracle";
    case PipelineAttack::kLeastSquares: return "lstsq";
    case PipelineAttack::kBinaryLira: return "binary-lira";
    case PipelineAttack::kIterativeVoting: return "iterative-voting";
  }
  return "?";
}

PipelineAttack pipeline_attack_from_string(const std::string& s) {
  if (s == "lira") return PipelineAttack::kLira;
  if (s == "voting") return PipelineAttack::kVoting;
  if (s == "oracle") return PipelineAttack::kOracle;
  if (s == "lstsq") return PipelineAttack::kLeastSquares;
  if (s == "binary-lira") return PipelineAttack::kBinaryLira;
  if (s == "iterative-voting") return PipelineAttack::kIterativeVoting;
  throw ParameterError("unknown pipeline attack '" + s + "'");
}

namespace {

MatrixF drop_rows(const MatrixF& m, const std::vector<Index>& exclude) {
  if (exclude.empty()) return m;
  std::set<Index> gone(exclude.begin(), exclude.end());
  MatrixF out(m.rows() - static_cast<Index>(gone.size()), m.cols());
  Index r = 0;
  for (Index i = 0; i < m.rows(); ++i) {
    if (!gone.count(i)) out.row(r++) = m.row(i);
  }
  return out;
}

}  // namespace

PipelineRun run_pipeline(const PipelineConfig& config, std::uint64_t seed,
                         const std::vector<Index>& exclude) {
  PipelineRun run;

  if (config.method == CurationMethod::kImageNN) {
    EmbeddingMatrix pool, targets;
    if (config.hub_fixture) {
      const Index shielded = std::max<Index>(1, config.n_targets / config.hub_count - 1);
      HubFixture fx = make_hub_fixture(seed, config.hub_count, shielded, config.probes_per_hub,
                                       config.dim);
      pool = std::move(fx.pool);
      targets = std::move(fx.targets);
    } else {
      pool = generate_embeddings(derive_seed(seed, "pipe.pool", 0), config.pool_n, config.dim,
                                 config.clusters, config.spread);
      targets = generate_embeddings(derive_seed(seed, "pipe.targets", 0), config.n_targets,
                                    config.dim, config.clusters, config.spread);
    }

    const Index full_n = targets.rows();
    for (Index t = 0; t < full_n; ++t) {
      bool gone = std::find(exclude.begin(), exclude.end(), t) != exclude.end();
      if (!gone) run.target_ids.push_back(static_cast<int>(t));
    }
    targets.data = drop_rows(targets.data, exclude);

    const Index n = targets.rows();
    TargetSet ts = make_target_set(n);
    ts = sample_selected(ts, config.selected_fraction, derive_seed(seed, "pipe.sel", 0));
    const std::vector<int> sel = ts.selected_positions();

    const int k = std::min<int>(config.resolved_k(), static_cast<int>(pool.rows()));
    const Curator curator = Curator::image(pool, targets, k);
    const CurationResult victim = curator.run(sel);

    AttackScores attack;
    switch (config.attack) {
      case PipelineAttack::kLira: {
        const ShadowAssignment assignment =
            build_assignment(n, config.m_shadows, derive_seed(seed, "pipe.shadow", 0));
        const ShadowEnsemble ensemble = run_shadows(curator, assignment, EnsembleKind::kScores);
        attack = lira_gaussian_all(ensemble, victim.scores);
        break;
      }
      case PipelineAttack::kVoting:
        attack = voting_image(pool, targets, victim.scores);
        break;
      case PipelineAttack::kOracle:
        attack = oracle_attack_image(pool, targets, victim.scores);
        break;
      case PipelineAttack::kBinaryLira: {
        const ShadowAssignment assignment =
            build_assignment(n, config.m_shadows, derive_seed(seed, "pipe.shadow", 0));
        const ShadowEnsemble ensemble = run_shadows(curator, assignment, EnsembleKind::kMasks);
        attack = binary_lira_all(ensemble, victim.mask,
                                 default_bernoulli_clamp(config.m_shadows));
        break;
      }
      case PipelineAttack::kIterativeVoting:
        attack = iterative_voting(curator, victim.mask).scores;
        break;
      case PipelineAttack::kLeastSquares:
        throw ParameterError("run_pipeline: lstsq applies to trak curation");
    }
    attack.labels = ts.selected;
    run.scores = std::move(attack);
    return run;
  }

  // TRAK pipeline.
  GradientMatrix pool = generate_gradients(derive_seed(seed, "pipe.pool", 0), config.pool_n,
                                           config.dim);
  GradientMatrix targets = generate_gradients(derive_seed(seed, "pipe.targets", 0),
                                              config.n_targets, config.dim);
  const Index full_n = targets.rows();
  for (Index t = 0; t < full_n; ++t) {
    bool gone = std::find(exclude.begin(), exclude.end(), t) != exclude.end();
    if (!gone) run.target_ids.push_back(static_cast<int>(t));
  }
  targets.data = drop_rows(targets.data, exclude);
  targets.q = VectorD::Ones(targets.data.rows());

  const Index n = targets.rows();
  TargetSet ts = make_target_set(n);
  ts = sample_selected(ts, config.selected_fraction, derive_seed(seed, "pipe.sel", 0));
  const std::vector<int> sel = ts.selected_positions();

  const double lambda = config.lambda > 0 ? config.lambda : default_trak_lambda(pool);
  const TrakSystem sys = trak_features(pool, lambda);
  const int k = std::min<int>(config.resolved_k(), static_cast<int>(sys.pool_size()));
  const Curator curator = Curator::trak(sys, targets, k);
  const CurationResult victim = curator.run(sel);

  AttackScores attack;
  switch (config.attack) {
    case PipelineAttack::kLira: {
      const ShadowAssignment assignment =
          build_assignment(n, config.m_shadows, derive_seed(seed, "pipe.shadow", 0));
      const ShadowEnsemble ensemble = run_shadows(curator, assignment, EnsembleKind::kScores);
      attack = lira_gaussian_all(ensemble, victim.scores);
      break;
    }
    case PipelineAttack::kLeastSquares:
      attack = least_squares_trak(sys, targets, victim.scores).scores;
      break;
    case PipelineAttack::kBinaryLira: {
      const ShadowAssignment assignment =
          build_assignment(n, config.m_shadows, derive_seed(seed, "pipe.shadow", 0));
      const ShadowEnsemble ensemble = run_shadows(curator, assignment, EnsembleKind::kMasks);
      attack = binary_lira_all(ensemble, victim.mask, default_bernoulli_clamp(config.m_shadows));
      break;
    }
    default:
      throw ParameterError("run_pipeline: attack not applicable to trak curation");
  }
  attack.labels = ts.selected;
  run.scores = std::move(attack);
  return run;
}

OnionReport onion_experiment(const PipelineConfig& config, double removal_fraction,
                             const std::vector<std::uint64_t>& seeds) {
  if (!(removal_fraction > 0.0) || !(removal_fraction < 0.5)) {
    throw ParameterError("onion_experiment: removal fraction must be in (0, 0.5)");
  }
  if (seeds.empty()) throw ParameterError("onion_experiment: need at least one seed");

  // Baseline runs; the vulnerability ranking is the mean per-target attack
  // score across seeds.
  const Index n = config.hub_fixture
                      ? config.hub_count * (1 + std::max<Index>(1, config.n_targets / config.hub_count - 1))
                      : config.n_targets;
  VectorD mean_score = VectorD::Zero(n);
  std::vector<PipelineRun> baseline_runs;
  OnionReport report;
  report.removed_fraction = removal_fraction;

  for (auto seed : seeds) {
    PipelineRun run = run_pipeline(config, seed);
    mean_score += run.scores.values;
    report.per_seed["Baseline"].push_back(roc_curve(run.scores).auc);
    baseline_runs.push_back(std::move(run));
  }
  mean_score /= static_cast<double>(seeds.size());

  const auto n_remove = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(removal_fraction * static_cast<double>(n))));
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (mean_score[a] != mean_score[b]) return mean_score[a] > mean_score[b];
    return a < b;
  });
  report.vulnerable.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_remove));

  // Ideal: pure post-filter of the baseline scores; no attack re-run.
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    const PipelineRun& run = baseline_runs[si];
    VectorD kept(n - static_cast<Index>(n_remove));
    std::vector<std::uint8_t> kept_labels;
    Index w = 0;
    for (Index t = 0; t < n; ++t) {
      if (std::find(report.vulnerable.begin(), report.vulnerable.end(), t) ==
          report.vulnerable.end()) {
        kept[w++] = run.scores.values[t];
        kept_labels.push_back(run.scores.labels[static_cast<std::size_t>(t)]);
      }
    }
    report.per_seed["Ideal"].push_back(roc_curve(kept, kept_labels).auc);
  }

  // Removal scenarios re-run the whole pipeline on the reduced target set.
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    const auto seed = seeds[si];
    {
      PipelineRun run = run_pipeline(config, seed, report.vulnerable);
      report.per_seed["VulnerableRemoval"].push_back(roc_curve(run.scores).auc);
    }
    {
      std::vector<Index> pool_ids(static_cast<std::size_t>(n));
      std::iota(pool_ids.begin(), pool_ids.end(), Index{0});
      Rng rng = Rng::substream(seed, "onion.random");
      for (std::size_t i = 0; i < n_remove; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(pool_ids.size() - i));
        std::swap(pool_ids[i], pool_ids[j]);
      }
      std::vector<Index> random_removed(pool_ids.begin(),
                                        pool_ids.begin() + static_cast<std::ptrdiff_t>(n_remove));
      PipelineRun run = run_pipeline(config, seed, random_removed);
      report.per_seed["RandomRemoval"].push_back(roc_curve(run.scores).auc);
    }
  }

  for (const auto& [name, aucs] : report.per_seed) {
    report.auc[name] = std::accumulate(aucs.begin(), aucs.end(), 0.0) /
                       static_cast<double>(aucs.size());
  }
  return report;
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::kTargetSize: return "target-size";
    case SweepAxis::kDim: return "dim";
    case SweepAxis::kShadowCount: return "shadows";
  }
  return "?";
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "target-size") return SweepAxis::kTargetSize;
  if (s == "dim") return SweepAxis::kDim;
  if (s == "shadows") return SweepAxis::kShadowCount;
  throw ParameterError("unknown sweep axis '" + s + "' (target-size|dim|shadows)");
}

std::vector<SweepCell> sweep(const PipelineConfig& base, SweepAxis axis,
                             const std::vector<Index>& values,
                             const std::vector<PipelineAttack>& attacks,
                             const std::vector<std::uint64_t>& seeds) {
  if (values.empty() || attacks.empty() || seeds.empty()) {
    throw ParameterError("sweep: grid, attacks and seeds must be nonempty");
  }

  std::vector<SweepCell> table;
  for (Index value : values) {
    PipelineConfig cfg = base;
    switch (axis) {
      case SweepAxis::kTargetSize:
        cfg.n_targets = 2 * value;  // |T_sel| = value at the default 50% split
        break;
      case SweepAxis::kDim:
        cfg.dim = value;
        break;
      case SweepAxis::kShadowCount:
        cfg.m_shadows = value;
        break;
    }
    for (PipelineAttack attack : attacks) {
      cfg.attack = attack;
      SweepCell cell;
      cell.value = static_cast<double>(value);
      cell.attack = to_string(attack);

      std::vector<double> aucs;
      std::map<double, std::vector<double>> tprs;
      for (auto seed : seeds) {
        const PipelineRun run = run_pipeline(cfg, seed);
        aucs.push_back(roc_curve(run.scores).auc);
        for (double budget : kReportedFprBudgets) {
          tprs[budget].push_back(tpr_at_fpr(run.scores.values, run.scores.labels, budget));
        }
      }
      auto mean_std = [](const std::vector<double>& v) {
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double var = 0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size());
        return std::pair<double, double>(mean, std::sqrt(var));
      };
      std::tie(cell.auc_mean, cell.auc_std) = mean_std(aucs);
      for (auto& [budget, v] : tprs) {
        std::tie(cell.tpr_mean[budget], cell.tpr_std[budget]) = mean_std(v);
      }
      cell.seed_tpr_at_1pct = tprs[0.01];
      table.push_back(std::move(cell));
    }
  }
  return table;
}

}  // namespace curmi
