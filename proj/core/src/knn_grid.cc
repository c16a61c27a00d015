#include "depthkit/knn_grid.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace depthkit {
namespace {

bool Closer(const Neighbor& a, const Neighbor& b) {
  return a.dist2 != b.dist2 ? a.dist2 < b.dist2 : a.index < b.index;
}

}  // namespace

KnnGrid::KnnGrid(int width, int height, std::vector<GridPoint> points)
    : width_(width), height_(height), points_(std::move(points)) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("KnnGrid: empty domain");
  if (points_.empty()) throw std::invalid_argument("KnnGrid: no points");
  const double area = static_cast<double>(width) * height;
  cell_ = std::max(1, static_cast<int>(std::ceil(
                          std::sqrt(area / static_cast<double>(points_.size())))));
  cols_ = (width + cell_ - 1) / cell_;
  rows_ = (height + cell_ - 1) / cell_;

  std::vector<std::size_t> counts(static_cast<std::size_t>(cols_) * rows_ + 1, 0);
  auto cell_of = [&](const GridPoint& p) {
    if (p.u < 0 || p.v < 0 || p.u >= width_ || p.v >= height_) {
      throw std::invalid_argument("KnnGrid: point outside the domain");
    }
    return static_cast<std::size_t>(p.v / cell_) * cols_ + p.u / cell_;
  };
  for (const GridPoint& p : points_) ++counts[cell_of(p) + 1];
  for (std::size_t c = 1; c < counts.size(); ++c) counts[c] += counts[c - 1];
  cell_start_ = counts;
  cell_items_.resize(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    cell_items_[counts[cell_of(points_[i])]++] = i;
  }
}

void KnnGrid::Query(int u, int v, std::size_t k, std::vector<Neighbor>& out) const {
  out.clear();
  if (k == 0) return;
  k = std::min(k, points_.size());
  const int cu = std::clamp(u / cell_, 0, cols_ - 1);
  const int cv = std::clamp(v / cell_, 0, rows_ - 1);
  const int max_ring = std::max({cu, cols_ - 1 - cu, cv, rows_ - 1 - cv});

  auto consider = [&](int col, int row) {
    const std::size_t c = static_cast<std::size_t>(row) * cols_ + col;
    for (std::size_t it = cell_start_[c]; it < cell_start_[c + 1]; ++it) {
      const std::size_t idx = cell_items_[it];
      const long long du = points_[idx].u - u;
      const long long dv = points_[idx].v - v;
      const Neighbor cand{idx, du * du + dv * dv};
      if (out.size() < k) {
        out.insert(std::upper_bound(out.begin(), out.end(), cand, Closer), cand);
      } else if (Closer(cand, out.back())) {
        out.pop_back();
        out.insert(std::upper_bound(out.begin(), out.end(), cand, Closer), cand);
      }
    }
  };

  for (int r = 0; r <= max_ring; ++r) {
    if (r == 0) {
      consider(cu, cv);
    } else {
      for (int col = cu - r; col <= cu + r; ++col) {
        if (col < 0 || col >= cols_) continue;
        if (cv - r >= 0) consider(col, cv - r);
        if (cv + r < rows_) consider(col, cv + r);
      }
      for (int row = cv - r + 1; row <= cv + r - 1; ++row) {
        if (row < 0 || row >= rows_) continue;
        if (cu - r >= 0) consider(cu - r, row);
        if (cu + r < cols_) consider(cu + r, row);
      }
    }
    if (out.size() == k) {
      // Every point outside the searched block is at least this far away.
      const long long x0 = static_cast<long long>(cu - r) * cell_;
      const long long x1 = static_cast<long long>(cu + r + 1) * cell_;
      const long long y0 = static_cast<long long>(cv - r) * cell_;
      const long long y1 = static_cast<long long>(cv + r + 1) * cell_;
      const long long reach = std::min({u - x0, x1 - u, v - y0, y1 - v});
      if (out.back().dist2 < reach * reach) break;
    }
  }
}

double InverseDistanceWeight(std::span<const Neighbor> neighbors,
                             const std::vector<GridPoint>& points, double power) {
  if (neighbors.empty()) throw std::invalid_argument("IDW: no neighbours");
  if (neighbors.front().dist2 == 0) return points[neighbors.front().index].value;
  double num = 0.0, den = 0.0;
  for (const Neighbor& n : neighbors) {
    const double w = std::pow(static_cast<double>(n.dist2), -0.5 * power);
    num += w * points[n.index].value;
    den += w;
  }
  return num / den;
}

}  // namespace depthkit
