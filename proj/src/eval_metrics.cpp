#include "visrl/eval_metrics.hpp"

#include <algorithm>
#include <numeric>

#include "visrl/errors.hpp"
#include "visrl/geometry.hpp"

namespace visrl {

double area_ratio_score(const Box& bbox, double image_width, double image_height) {
  const double image_area = image_width * image_height;
  if (!(image_area > 0.0)) throw InputError("image dimensions must be positive");
  return std::clamp(bbox.area() / image_area, 0.0, 1.0);
}

std::array<double, 10> coco_iou_thresholds() {
  std::array<double, 10> t{};
  const double step = (0.95 - 0.5) / 9.0;
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i) * step + 0.5;
  return t;
}

std::array<double, 101> recall_sample_points() {
  std::array<double, 101> r{};
  const double step = 1.0 / 100.0;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<double>(i) * step;
  return r;
}

PRCurve pr_curve(std::span<const ScoredPrediction> preds, const GroundTruthBoxes& gts,
                 double iou_thr) {
  std::size_t total_gts = 0;
  for (const auto& [id, boxes] : gts) total_gts += boxes.size();
  if (total_gts == 0) throw UndefinedMetricError("AP is undefined without ground truths");

  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return preds[a].score > preds[b].score;
  });

  std::map<std::string, std::vector<char>> consumed;
  for (const auto& [id, boxes] : gts) consumed[id].assign(boxes.size(), 0);

  PRCurve curve;
  curve.points.reserve(preds.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const ScoredPrediction& p = preds[order[k]];
    const auto gt_it = gts.find(p.sample_id);
    if (gt_it != gts.end()) {
      std::vector<char>& used = consumed[p.sample_id];
      double best = -1.0;
      std::size_t best_j = 0;
      for (std::size_t j = 0; j < gt_it->second.size(); ++j) {
        if (used[j]) continue;
        const double v = iou(p.bbox, gt_it->second[j]);
        if (v > best) {
          best = v;
          best_j = j;
        }
      }
      if (best >= iou_thr) {
        used[best_j] = 1;
        ++tp;
      }
    }
    curve.points.emplace_back(static_cast<double>(tp) / static_cast<double>(total_gts),
                              static_cast<double>(tp) / static_cast<double>(k + 1));
  }

  // Precision envelope from the right, then sample at each recall point.
  std::vector<double> envelope(curve.points.size());
  double running = 0.0;
  for (std::size_t i = curve.points.size(); i-- > 0;) {
    running = std::max(running, curve.points[i].second);
    envelope[i] = running;
  }
  double sum = 0.0;
  for (const double r : recall_sample_points()) {
    const auto it = std::lower_bound(
        curve.points.begin(), curve.points.end(), r,
        [](const std::pair<double, double>& pt, double value) { return pt.first < value; });
    if (it != curve.points.end()) sum += envelope[static_cast<std::size_t>(it - curve.points.begin())];
  }
  curve.ap = sum / 101.0;
  return curve;
}

double ap_at_iou(std::span<const ScoredPrediction> preds, const GroundTruthBoxes& gts,
                 double iou_thr) {
  return pr_curve(preds, gts, iou_thr).ap;
}

double coco_ap(std::span<const ScoredPrediction> preds, const GroundTruthBoxes& gts) {
  double sum = 0.0;
  const auto thresholds = coco_iou_thresholds();
  for (const double t : thresholds) sum += ap_at_iou(preds, gts, t);
  return sum / static_cast<double>(thresholds.size());
}

double mask_iou(const MaskGrid& a, const MaskGrid& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw InputError("mask pair has mismatched dimensions");
  }
  std::size_t inter = 0, uni = 0;
  const auto ab = a.bits();
  const auto bb = b.bits();
  for (std::size_t i = 0; i < ab.size(); ++i) {
    const bool x = ab[i] != 0, y = bb[i] != 0;
    inter += x && y;
    uni += x || y;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double g_iou(std::span<const MaskGrid> pred_masks, std::span<const MaskGrid> gt_masks) {
  if (pred_masks.size() != gt_masks.size()) throw InputError("mask lists differ in length");
  if (pred_masks.empty()) throw InputError("gIoU needs at least one mask pair");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred_masks.size(); ++i) sum += mask_iou(pred_masks[i], gt_masks[i]);
  return sum / static_cast<double>(pred_masks.size());
}

double count_accuracy(std::span<const long long> pred_counts,
                      std::span<const long long> gt_counts) {
  if (pred_counts.size() != gt_counts.size()) throw InputError("count lists differ in length");
  if (pred_counts.empty()) throw InputError("count accuracy needs at least one sample");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred_counts.size(); ++i) hits += pred_counts[i] == gt_counts[i];
  return static_cast<double>(hits) / static_cast<double>(pred_counts.size());
}

}  // namespace visrl
