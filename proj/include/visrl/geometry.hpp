#pragma once

#include <span>

#include "visrl/types.hpp"

namespace visrl {

// Box IoU with continuous areas; 0 when the union is empty. Boxes must be canonical.
double iou(const Box& a, const Box& b);

// Mean absolute difference of the four box coordinates.
double box_l1(const Box& a, const Box& b);

// Mean absolute difference of the two point coordinates.
double point_l1(const Point& p, const Point& q);

// K x N matrices, rows indexed by prediction, columns by ground truth.
struct PairwiseMatrices {
  Matrix<double> iou;
  Matrix<double> box_l1;
  Matrix<double> point_l1;

  std::size_t rows() const { return iou.rows(); }
  std::size_t cols() const { return iou.cols(); }
};

/// All pairwise IoU / box L1 / point L1 values. Coordinates are unpacked into
/// contiguous columns once and each row is filled by a branch-free pass over
/// the ground-truth columns, so the inner loops auto-vectorize.
PairwiseMatrices batch_pairwise(std::span<const Instance> preds, std::span<const Instance> gts);

}  // namespace visrl
