#include "visrl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace visrl {

double iou(const Box& a, const Box& b) {
  const double iw = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double ih = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double box_l1(const Box& a, const Box& b) {
  return (std::abs(a.x1 - b.x1) + std::abs(a.y1 - b.y1) + std::abs(a.x2 - b.x2) +
          std::abs(a.y2 - b.y2)) /
         4.0;
}

double point_l1(const Point& p, const Point& q) {
  return (std::abs(p.x - q.x) + std::abs(p.y - q.y)) / 2.0;
}

namespace {

struct Columns {
  std::vector<double> x1, y1, x2, y2, area, px, py;

  explicit Columns(std::span<const Instance> items) {
    const std::size_t n = items.size();
    for (auto* v : {&x1, &y1, &x2, &y2, &area, &px, &py}) v->resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Instance& it = items[i];
      x1[i] = it.bbox.x1;
      y1[i] = it.bbox.y1;
      x2[i] = it.bbox.x2;
      y2[i] = it.bbox.y2;
      area[i] = it.bbox.area();
      px[i] = it.point.x;
      py[i] = it.point.y;
    }
  }
};

}  // namespace

PairwiseMatrices batch_pairwise(std::span<const Instance> preds, std::span<const Instance> gts) {
  const std::size_t k = preds.size();
  const std::size_t n = gts.size();
  PairwiseMatrices m{Matrix<double>(k, n), Matrix<double>(k, n), Matrix<double>(k, n)};
  if (k == 0 || n == 0) return m;

  const Columns g(gts);
  const double* gx1 = g.x1.data();
  const double* gy1 = g.y1.data();
  const double* gx2 = g.x2.data();
  const double* gy2 = g.y2.data();
  const double* garea = g.area.data();
  const double* gpx = g.px.data();
  const double* gpy = g.py.data();

  for (std::size_t i = 0; i < k; ++i) {
    const Instance& p = preds[i];
    const double ax1 = p.bbox.x1, ay1 = p.bbox.y1, ax2 = p.bbox.x2, ay2 = p.bbox.y2;
    const double aarea = p.bbox.area();
    const double apx = p.point.x, apy = p.point.y;
    double* out_iou = m.iou.row(i).data();
    double* out_box = m.box_l1.row(i).data();
    double* out_pt = m.point_l1.row(i).data();

    for (std::size_t j = 0; j < n; ++j) {
      const double iw = std::max(0.0, std::min(ax2, gx2[j]) - std::max(ax1, gx1[j]));
      const double ih = std::max(0.0, std::min(ay2, gy2[j]) - std::max(ay1, gy1[j]));
      const double inter = iw * ih;
      const double uni = aarea + garea[j] - inter;
      out_iou[j] = uni > 0.0 ? inter / uni : 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
      out_box[j] = (std::abs(ax1 - gx1[j]) + std::abs(ay1 - gy1[j]) + std::abs(ax2 - gx2[j]) +
                    std::abs(ay2 - gy2[j])) /
                   4.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
      out_pt[j] = (std::abs(apx - gpx[j]) + std::abs(apy - gpy[j])) / 2.0;
    }
  }
  return m;
}

}  // namespace visrl
