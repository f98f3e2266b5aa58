#include "visrl/matching.hpp"

#include <algorithm>
#include <cmath>

#include "visrl/errors.hpp"
#include "visrl/hungarian.hpp"

namespace visrl {

void Thresholds::validate() const {
  for (const double t : {iou_min, box_l1_max, point_l1_max}) {
    if (!std::isfinite(t) || t <= 0.0) {
      throw InputError("thresholds must be positive and finite");
    }
  }
}

CostMatrix build_cost(const PairwiseMatrices& matrices, const Thresholds& thr) {
  const std::size_t k = matrices.rows();
  const std::size_t n = matrices.cols();
  CostMatrix cost(k, n);
  const auto ious = matrices.iou.values();
  const auto boxes = matrices.box_l1.values();
  const auto points = matrices.point_l1.values();
  auto out = cost.values();
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    out[idx] = 3 - (static_cast<int>(ious[idx] > thr.iou_min) +
                    static_cast<int>(boxes[idx] < thr.box_l1_max) +
                    static_cast<int>(points[idx] < thr.point_l1_max));
  }
  return cost;
}

MatchResult match_from_matrices(const PairwiseMatrices& matrices, const Thresholds& thr) {
  MatchResult result;
  const std::size_t k = matrices.rows();
  const std::size_t n = matrices.cols();
  if (k == 0 || n == 0) return result;

  const CostMatrix cost = build_cost(matrices, thr);
  auto assignment = hungarian(cost);
  result.pairs = std::move(assignment.pairs);
  result.total_cost = assignment.total_cost;

  const double l_max = static_cast<double>(std::max(k, n));
  const int total = 3 * static_cast<int>(result.pairs.size()) - result.total_cost;
  result.accuracy_reward = total / l_max;

  int iou_hits = 0, box_hits = 0, point_hits = 0;
  for (const auto& [i, j] : result.pairs) {
    iou_hits += matrices.iou(i, j) > thr.iou_min;
    box_hits += matrices.box_l1(i, j) < thr.box_l1_max;
    point_hits += matrices.point_l1(i, j) < thr.point_l1_max;
  }
  result.iou_reward = iou_hits / l_max;
  result.box_l1_reward = box_hits / l_max;
  result.point_l1_reward = point_hits / l_max;
  return result;
}

MatchResult accuracy_reward(std::span<const Instance> preds, std::span<const Instance> gts,
                            const Thresholds& thr) {
  return match_from_matrices(batch_pairwise(preds, gts), thr);
}

}  // namespace visrl
