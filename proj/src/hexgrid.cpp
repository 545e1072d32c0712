#include "tlfw/hexgrid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "tlfw/energy.hpp"
#include "tlfw/error.hpp"

namespace tlfw {

namespace {

const double kSqrt3 = std::sqrt(3.0);

Axial cube_round(double qf, double rf) {
  const double sf = -qf - rf;
  double q = std::round(qf), r = std::round(rf), s = std::round(sf);
  const double dq = std::abs(q - qf), dr = std::abs(r - rf), ds = std::abs(s - sf);
  if (dq > dr && dq > ds) {
    q = -r - s;
  } else if (dr > ds) {
    r = -q - s;
  }
  return {static_cast<int>(q), static_cast<int>(r)};
}

constexpr std::array<Axial, 6> kNeighbours{{{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}}};

}  // namespace

Point cell_center(Axial c, double side) {
  return {side * kSqrt3 * (c.q + 0.5 * c.r), side * 1.5 * c.r};
}

Axial cell_index(Point p, double side) {
  if (!(side > 0.0)) throw InputError("cell side must be > 0");
  const double qf = (kSqrt3 / 3.0 * p.x - p.y / 3.0) / side;
  const double rf = (2.0 / 3.0 * p.y) / side;
  const Axial rounded = cube_round(qf, rf);

  // Hex cells are the Voronoi regions of their centers, so containment is
  // nearest-center. Checking the neighbours settles points on shared edges.
  Axial best = rounded;
  double bestD = distance(p, cell_center(rounded, side));
  const double tol = 1e-12 * side;
  for (const Axial& dn : kNeighbours) {
    const Axial cand{rounded.q + dn.q, rounded.r + dn.r};
    const double d = distance(p, cell_center(cand, side));
    if (d < bestD - tol || (std::abs(d - bestD) <= tol && cand < best)) {
      if (d < bestD - tol) bestD = d;
      best = cand;
    }
  }
  return best;
}

std::vector<Point> CellPlan::centers() const {
  std::vector<Point> out;
  out.reserve(cells.size());
  for (const Cell& c : cells) out.push_back(c.hex.center);
  return out;
}

CellPlan occupied_cells(const Scenario& scenario, std::span<const int> nodeIds, double side) {
  std::map<Axial, std::vector<int>> byCell;
  for (int id : nodeIds) byCell[cell_index(scenario.node(id).pos, side)].push_back(id);
  CellPlan plan;
  plan.side = side;
  for (auto& [coord, members] : byCell) {
    std::sort(members.begin(), members.end());
    plan.cells.push_back({HexCell{coord, cell_center(coord, side)}, std::move(members)});
  }
  return plan;
}

CellPlan occupied_cells(const Scenario& scenario, const Cluster& cluster, double side) {
  return occupied_cells(scenario, cluster.memberIds, side);
}

std::vector<std::size_t> reachable_stops(Point node, std::span<const Point> stops,
                                         double dDelta) {
  if (!(dDelta > 0.0)) throw InputError("charging range must be > 0");
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < stops.size(); ++k)
    if (distance(node, stops[k]) <= dDelta * (1.0 + 1e-12)) out.push_back(k);
  return out;
}

}  // namespace tlfw
