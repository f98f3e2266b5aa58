#include "visrl/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <vector>

#include "visrl/errors.hpp"
#include "visrl/hungarian.hpp"

namespace visrl {
namespace {

using Coords = std::vector<double>;

// Arguments are taken by value on purpose: this is the per-pair copy the
// batch path avoids.
double list_iou(Coords a, Coords b) {
  const double iw = std::max(0.0, std::min(a[2], b[2]) - std::max(a[0], b[0]));
  const double ih = std::max(0.0, std::min(a[3], b[3]) - std::max(a[1], b[1]));
  const double inter = iw * ih;
  const double uni = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double list_l1(Coords a, Coords b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

std::vector<Instance> random_instances(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coord(0.0, 1000.0);
  std::vector<Instance> out(n);
  for (Instance& inst : out) {
    Box b{coord(rng), coord(rng), coord(rng), coord(rng)};
    if (b.x1 > b.x2) std::swap(b.x1, b.x2);
    if (b.y1 > b.y2) std::swap(b.y1, b.y2);
    inst = {b, {(b.x1 + b.x2) / 2, (b.y1 + b.y2) / 2}};
  }
  return out;
}

// Small perturbation of `base` so that matching has real work to do.
std::vector<Instance> jitter(std::span<const Instance> base, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 6.0);
  std::vector<Instance> out(base.begin(), base.end());
  for (Instance& inst : out) {
    inst.bbox = {inst.bbox.x1 + noise(rng), inst.bbox.y1 + noise(rng), inst.bbox.x2 + noise(rng),
                 inst.bbox.y2 + noise(rng)};
    if (inst.bbox.x1 > inst.bbox.x2) std::swap(inst.bbox.x1, inst.bbox.x2);
    if (inst.bbox.y1 > inst.bbox.y2) std::swap(inst.bbox.y1, inst.bbox.y2);
    inst.point = {inst.point.x + noise(rng), inst.point.y + noise(rng)};
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

}  // namespace

MatchResult accuracy_reward_unbatched(std::span<const Instance> preds,
                                      std::span<const Instance> gts, const Thresholds& thr) {
  const std::size_t k = preds.size();
  const std::size_t n = gts.size();
  MatchResult result;
  if (k == 0 || n == 0) return result;

  std::vector<Coords> pred_boxes, gt_boxes, pred_points, gt_points;
  for (const Instance& p : preds) {
    pred_boxes.push_back({p.bbox.x1, p.bbox.y1, p.bbox.x2, p.bbox.y2});
    pred_points.push_back({p.point.x, p.point.y});
  }
  for (const Instance& g : gts) {
    gt_boxes.push_back({g.bbox.x1, g.bbox.y1, g.bbox.x2, g.bbox.y2});
    gt_points.push_back({g.point.x, g.point.y});
  }

  std::vector<std::vector<double>> ious(k, std::vector<double>(n));
  std::vector<std::vector<double>> box_dist(k, std::vector<double>(n));
  std::vector<std::vector<double>> point_dist(k, std::vector<double>(n));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) ious[i][j] = list_iou(pred_boxes[i], gt_boxes[j]);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) box_dist[i][j] = list_l1(pred_boxes[i], gt_boxes[j]);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) point_dist[i][j] = list_l1(pred_points[i], gt_points[j]);

  CostMatrix cost(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      int passes = 0;
      if (ious[i][j] > thr.iou_min) ++passes;
      if (box_dist[i][j] < thr.box_l1_max) ++passes;
      if (point_dist[i][j] < thr.point_l1_max) ++passes;
      cost(i, j) = 3 - passes;
    }
  }

  auto assignment = hungarian(cost);
  result.pairs = std::move(assignment.pairs);
  result.total_cost = assignment.total_cost;
  const double l_max = static_cast<double>(std::max(k, n));
  result.accuracy_reward = (3 * static_cast<int>(result.pairs.size()) - result.total_cost) / l_max;
  int iou_hits = 0, box_hits = 0, point_hits = 0;
  for (const auto& [i, j] : result.pairs) {
    iou_hits += ious[i][j] > thr.iou_min;
    box_hits += box_dist[i][j] < thr.box_l1_max;
    point_hits += point_dist[i][j] < thr.point_l1_max;
  }
  result.iou_reward = iou_hits / l_max;
  result.box_l1_reward = box_hits / l_max;
  result.point_l1_reward = point_hits / l_max;
  return result;
}

BenchReport bench_matching(std::size_t objects, std::size_t repetitions, std::uint64_t seed) {
  if (objects == 0) throw InputError("object count must be at least 1");
  if (repetitions == 0) throw InputError("repetition count must be at least 1");

  std::mt19937_64 rng(seed);
  const std::vector<Instance> gts = random_instances(objects, rng);
  const std::vector<Instance> preds = jitter(gts, rng);
  const Thresholds thr;

  using clock = std::chrono::steady_clock;
  BenchReport report;
  report.objects = objects;
  report.repetitions = repetitions;

  // Warm both paths once so neither pays first-touch costs inside the timed loop.
  const MatchResult batch_ref = accuracy_reward(preds, gts, thr);
  const MatchResult naive_ref = accuracy_reward_unbatched(preds, gts, thr);
  report.results_agree = batch_ref.total_cost == naive_ref.total_cost &&
                         batch_ref.accuracy_reward == naive_ref.accuracy_reward;

  volatile long long sink = 0;
  auto start = clock::now();
  for (std::size_t r = 0; r < repetitions; ++r) sink = sink + accuracy_reward(preds, gts, thr).total_cost;
  const double batch_total = std::chrono::duration<double>(clock::now() - start).count();

  start = clock::now();
  for (std::size_t r = 0; r < repetitions; ++r)
    sink = sink + accuracy_reward_unbatched(preds, gts, thr).total_cost;
  const double naive_total = std::chrono::duration<double>(clock::now() - start).count();

  report.batch_seconds = batch_total / static_cast<double>(repetitions);
  report.naive_seconds = naive_total / static_cast<double>(repetitions);
  report.speedup = report.batch_seconds > 0.0 ? report.naive_seconds / report.batch_seconds : 0.0;
  return report;
}

}  // namespace visrl
