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

#ifndef CURMI_EVAL_HPP
#define CURMI_EVAL_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "curmi/types.hpp"

namespace curmi {

struct RocCurve {
  std::vector<double> thresholds;  // descending, one per step
  std::vector<double> fpr;         // nondecreasing, starts 0, ends 1
  std::vector<double> tpr;
  double auc = 0.0;
};

/// Threshold sweep over distinct score values (descending, ties grouped).
/// Throws ParameterError when only one class is present.
RocCurve roc_curve(const AttackScores& scores);
RocCurve roc_curve(const VectorD& values, const std::vector<std::uint8_t>& labels);

/// Maximum TPR over thresholds whose FPR <= budget (step function, no
/// interpolation).
double tpr_at_fpr(const VectorD& values, const std::vector<std::uint8_t>& labels,
                  double fpr_budget);

inline const std::vector<double> kReportedFprBudgets = {0.001, 0.01, 0.1};

// ---------------------------------------------------------------------------
// Composite experiments.
// ---------------------------------------------------------------------------

enum class PipelineAttack { kLira, kVoting, kOracle, kLeastSquares, kBinaryLira, kIterativeVoting };

std::string to_string(PipelineAttack a);
PipelineAttack pipeline_attack_from_string(const std::string& s);

/// One self-contained synthetic victim + attack run, shared by the onion and
/// sweep experiments.
struct PipelineConfig {
  CurationMethod method = CurationMethod::kImageNN;
  PipelineAttack attack = PipelineAttack::kLira;

  // fixture geometry
  Index pool_n = 2000;
  Index dim = 32;            // embedding dim or gradient d_proj
  Index n_targets = 100;
  Index clusters = 8;        // image fixture (ignored for hub fixtures)
  double spread = 0.25;
  bool hub_fixture = false;  // image only: hub-concentrated geometry
  Index hub_count = 3;
  Index probes_per_hub = 25;

  double selected_fraction = 0.5;
  int k = 0;  // <= 0 selects pool_n / 10
  Index m_shadows = 64;
  double lambda = 0.0;  // <= 0 selects the trak default

  int resolved_k() const { return k > 0 ? k : static_cast<int>(pool_n / 10); }
};

struct PipelineRun {
  AttackScores scores;  // labeled per target
  std::vector<int> target_ids;
};

/// Builds the fixture, runs the victim curation on a sampled T_sel, and
/// executes the configured attack. `exclude` drops targets from the fixture
/// before anything runs (used by the removal scenarios).
PipelineRun run_pipeline(const PipelineConfig& config, std::uint64_t seed,
                         const std::vector<Index>& exclude = {});

struct OnionReport {
  std::map<std::string, double> auc;  // Baseline / Ideal / VulnerableRemoval / RandomRemoval
  double removed_fraction = 0.0;
  std::vector<Index> vulnerable;      // target ids removed in VulnerableRemoval
  // per-seed AUC for each scenario, same seed order as the input
  std::map<std::string, std::vector<double>> per_seed;
};

/// Four-scenario removal experiment. Vulnerability ranking uses the mean
/// per-target attack score over the baseline seeds; "Ideal" is a pure
/// post-filter of the baseline scores. AUC is reported on remaining samples
/// only and averaged over seeds.
OnionReport onion_experiment(const PipelineConfig& config, double removal_fraction,
                             const std::vector<std::uint64_t>& seeds);

enum class SweepAxis { kTargetSize, kDim, kShadowCount };

std::string to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string& s);

struct SweepCell {
  double value = 0;  // the axis value for this row
  std::string attack;
  double auc_mean = 0, auc_std = 0;
  std::map<double, double> tpr_mean;  // fpr budget -> mean
  std::map<double, double> tpr_std;
  std::vector<double> seed_tpr_at_1pct;  // per-seed detail for trend checks
};

/// Single-axis grid over target sizes, dims, or shadow counts; per cell,
/// mean +- std of AUC and TPR at the reported FPR budgets over seeds.
/// For kTargetSize the axis value is |T_sel| with n = 2 * |T_sel|.
std::vector<SweepCell> sweep(const PipelineConfig& base, SweepAxis axis,
                             const std::vector<Index>& values,
                             const std::vector<PipelineAttack>& attacks,
                             const std::vector<std::uint64_t>& seeds);

}  // namespace curmi

#endif  // CURMI_EVAL_HPP
