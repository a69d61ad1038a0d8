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

// Brute-force reference implementations, kept independent of the library
// code paths they check.

#ifndef CURMI_TESTS_ORACLES_HPP
#define CURMI_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "curmi/types.hpp"

namespace curmi::oracles {

// Top-k by full sort with (score desc, index asc) ordering.
inline std::vector<std::uint8_t> topk_full_sort(const VectorD& scores, int k) {
  std::vector<Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(scores.size()), 0);
  for (int i = 0; i < k; ++i) mask[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;
  return mask;
}

// AUC as the normalized Mann-Whitney U statistic, ties counted 1/2.
inline double auc_pairwise(const VectorD& values, const std::vector<std::uint8_t>& labels) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (Index i = 0; i < values.size(); ++i) {
    if (!labels[static_cast<std::size_t>(i)]) continue;
    for (Index j = 0; j < values.size(); ++j) {
      if (labels[static_cast<std::size_t>(j)]) continue;
      ++pairs;
      if (values[i] > values[j]) wins += 1.0;
      else if (values[i] == values[j]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

// Max TPR over every candidate threshold (each distinct value and +inf),
// admitting score >= threshold, subject to FPR <= budget.
inline double tpr_exhaustive(const VectorD& values, const std::vector<std::uint8_t>& labels,
                             double budget) {
  std::size_t pos = 0, neg = 0;
  for (auto l : labels) (l ? pos : neg) += 1;

  std::vector<double> thresholds(values.data(), values.data() + values.size());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  double best = 0.0;  // +inf threshold admits nothing: TPR 0, FPR 0
  for (double thr : thresholds) {
    std::size_t tp = 0, fp = 0;
    for (Index i = 0; i < values.size(); ++i) {
      if (values[i] >= thr) (labels[static_cast<std::size_t>(i)] ? tp : fp) += 1;
    }
    const double fpr = static_cast<double>(fp) / static_cast<double>(neg);
    if (fpr <= budget) best = std::max(best, static_cast<double>(tp) / static_cast<double>(pos));
  }
  return best;
}

// Jaccard over index sets.
inline double jaccard_sets(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  std::set<std::size_t> sa, sb, inter, uni;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i]) sa.insert(i);
    if (b[i]) sb.insert(i);
  }
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                        std::inserter(inter, inter.begin()));
  std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(uni, uni.begin()));
  return uni.empty() ? 1.0 : static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

// Best k-subset of columns by least-squares residual, exhaustive search.
inline std::vector<Index> best_subset_exhaustive(const MatrixD& a, const VectorD& b, int k) {
  const Index cols = a.cols();
  std::vector<Index> best;
  double best_res = 1e300;
  std::vector<int> pick(static_cast<std::size_t>(k));

  // Enumerate combinations via odometer.
  for (int i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
  while (true) {
    MatrixD sub(a.rows(), k);
    for (int c = 0; c < k; ++c) sub.col(c) = a.col(pick[static_cast<std::size_t>(c)]);
    const VectorD x = sub.colPivHouseholderQr().solve(b);
    const double res = (b - sub * x).norm();
    if (res < best_res - 1e-12) {
      best_res = res;
      best.assign(pick.begin(), pick.end());
    }
    int pos = k - 1;
    while (pos >= 0 && pick[static_cast<std::size_t>(pos)] ==
                           static_cast<int>(cols) - k + pos) {
      --pos;
    }
    if (pos < 0) break;
    ++pick[static_cast<std::size_t>(pos)];
    for (int i = pos + 1; i < k; ++i) pick[static_cast<std::size_t>(i)] = pick[static_cast<std::size_t>(i - 1)] + 1;
  }
  return best;
}

}  // namespace curmi::oracles

#endif  // CURMI_TESTS_ORACLES_HPP
