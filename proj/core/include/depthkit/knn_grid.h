#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace depthkit {

struct GridPoint {
  int u = 0;
  int v = 0;
  double value = 0.0;
};

struct Neighbor {
  std::size_t index = 0;  // into the point list given to KnnGrid
  long long dist2 = 0;    // squared pixel distance
};

// Uniform bucket grid over a W x H pixel domain for k-nearest-neighbour
// queries. The cell size is chosen so that each cell holds about one point.
// Neighbours are ordered by (distance, point index), so results do not depend
// on bucket layout.
class KnnGrid {
 public:
  KnnGrid(int width, int height, std::vector<GridPoint> points);

  const std::vector<GridPoint>& points() const { return points_; }

  // Up to k nearest points to pixel (u, v). `out` is overwritten.
  void Query(int u, int v, std::size_t k, std::vector<Neighbor>& out) const;

 private:
  int width_;
  int height_;
  int cell_;
  int cols_;
  int rows_;
  std::vector<GridPoint> points_;
  std::vector<std::size_t> cell_start_;  // CSR offsets, size cols*rows + 1
  std::vector<std::size_t> cell_items_;
};

// Inverse-distance weighting of neighbour values with weights dist^-power.
// A neighbour at distance 0 returns its value verbatim.
double InverseDistanceWeight(std::span<const Neighbor> neighbors,
                             const std::vector<GridPoint>& points, double power);

}  // namespace depthkit
