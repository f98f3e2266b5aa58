#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "visrl/data_prep.hpp"
#include "visrl/types.hpp"

namespace visrl {

struct ScoredPrediction {
  std::string sample_id;
  Box bbox;
  double score = 0.0;
};

// Ground-truth boxes keyed by sample id.
using GroundTruthBoxes = std::map<std::string, std::vector<Box>>;

// Confidence proxy for models that emit no score: box area over image area, in [0, 1].
double area_ratio_score(const Box& bbox, double image_width, double image_height);

struct PRCurve {
  // (recall, precision) after each prediction in descending score order.
  std::vector<std::pair<double, double>> points;
  double ap = 0.0;
};

/// Precision/recall curve and 101-point interpolated AP. Predictions are
/// visited in descending score (ties keep input order); each one is a true
/// positive iff its best still-unmatched ground truth in the same sample has
/// IoU >= iou_thr, which then becomes consumed. Throws UndefinedMetricError
/// when there are no ground truths at all.
PRCurve pr_curve(std::span<const ScoredPrediction> preds, const GroundTruthBoxes& gts,
                 double iou_thr);

double ap_at_iou(std::span<const ScoredPrediction> preds, const GroundTruthBoxes& gts,
                 double iou_thr);

// 0.50, 0.55, ..., 0.95 generated as start + i * step.
std::array<double, 10> coco_iou_thresholds();

// 101 recall sample points 0, 0.01, ..., 1 generated as i * 0.01.
std::array<double, 101> recall_sample_points();

// Mean of ap_at_iou over coco_iou_thresholds().
double coco_ap(std::span<const ScoredPrediction> preds, const GroundTruthBoxes& gts);

// Pixel IoU of one mask pair; 1.0 when both are empty. Throws InputError on a size mismatch.
double mask_iou(const MaskGrid& a, const MaskGrid& b);

// Mean per-pair mask IoU. Throws InputError on a length or dimension mismatch or empty input.
double g_iou(std::span<const MaskGrid> pred_masks, std::span<const MaskGrid> gt_masks);

// Fraction of exact matches. Throws InputError on a length mismatch or empty input.
double count_accuracy(std::span<const long long> pred_counts, std::span<const long long> gt_counts);

}  // namespace visrl
