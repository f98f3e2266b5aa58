#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "visrl/geometry.hpp"
#include "visrl/types.hpp"

namespace visrl {

// Per-pair pass thresholds. Comparisons are strict: iou > iou_min,
// box_l1 < box_l1_max, point_l1 < point_l1_max.
struct Thresholds {
  double iou_min = 0.5;
  double box_l1_max = 10.0;
  double point_l1_max = 30.0;

  // Throws InputError unless every threshold is positive and finite.
  void validate() const;
};

// Entries in {0, 1, 2, 3}: three minus the number of criteria a pair passes.
using CostMatrix = Matrix<int>;

struct MatchResult {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (pred, gt)
  int total_cost = 0;
  // (3 |pairs| - total_cost) / max(K, N); 0 when either side is empty.
  double accuracy_reward = 0.0;
  // Per-criterion shares over the same matched pairs; they sum to accuracy_reward.
  double iou_reward = 0.0;
  double box_l1_reward = 0.0;
  double point_l1_reward = 0.0;
};

CostMatrix build_cost(const PairwiseMatrices& matrices, const Thresholds& thr);

/// Joint matching over the combined cost: pairwise geometry, threshold
/// indicators, one Hungarian solve, then the accuracy reward normalized by
/// max(K, N). Instances must be canonical.
MatchResult accuracy_reward(std::span<const Instance> preds, std::span<const Instance> gts,
                            const Thresholds& thr = {});

// Same as accuracy_reward for precomputed matrices.
MatchResult match_from_matrices(const PairwiseMatrices& matrices, const Thresholds& thr);

}  // namespace visrl
