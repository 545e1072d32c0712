#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "tlfw/clustering.hpp"
#include "tlfw/geometry.hpp"
#include "tlfw/scenario.hpp"

namespace tlfw {

/// Axial coordinates of a pointy-top hexagonal grid with a cell centered at (0, 0).
struct Axial {
  int q = 0;
  int r = 0;

  friend auto operator<=>(const Axial&, const Axial&) = default;
};

struct HexCell {
  Axial coord;
  Point center;
};

Point cell_center(Axial coord, double side);

/// The hexagon containing the point. Points on a shared edge go to the
/// lexicographically smallest (q, r) among the equidistant centers.
Axial cell_index(Point p, double side);

struct Cell {
  HexCell hex;
  std::vector<int> memberIds;
};

struct CellPlan {
  double side = 0.0;
  /// Occupied cells sorted by (q, r); members ascending.
  std::vector<Cell> cells;

  std::vector<Point> centers() const;
};

CellPlan occupied_cells(const Scenario& scenario, std::span<const int> nodeIds, double side);
/// Cells holding at least one normal node of the cluster.
CellPlan occupied_cells(const Scenario& scenario, const Cluster& cluster, double side);

/// Indices of the stops within dDelta of the node (closed range).
std::vector<std::size_t> reachable_stops(Point node, std::span<const Point> stops, double dDelta);

}  // namespace tlfw
