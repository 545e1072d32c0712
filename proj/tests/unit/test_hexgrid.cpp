#include <doctest.h>

#include <cmath>
#include <random>

#include "tlfw/clustering.hpp"
#include "tlfw/hexgrid.hpp"

using namespace tlfw;

namespace {
// Nearest center among a brute-force window of cells.
Axial nearest_by_scan(Point p, double s) {
  const double sq3 = std::sqrt(3.0);
  const int r0 = static_cast<int>(std::floor(p.y / (1.5 * s)));
  const int q0 = static_cast<int>(std::floor(p.x / (sq3 * s) - r0 / 2.0));
  Axial best{};
  double bd = 1e300;
  for (int r = r0 - 3; r <= r0 + 3; ++r)
    for (int q = q0 - 3; q <= q0 + 3; ++q) {
      const double d = std::hypot(p.x - sq3 * s * (q + r / 2.0), p.y - 1.5 * s * r);
      if (d < bd) bd = d, best = {q, r};
    }
  return best;
}
}  // namespace

TEST_CASE("cell centers") {
  CHECK(cell_index({0, 0}, 0.1) == Axial{0, 0});
  const Point c = cell_center({1, 0}, 0.1);
  CHECK(c.x == doctest::Approx(0.17321).epsilon(1e-4));
  CHECK(c.y == doctest::Approx(0.0));
  const Point c2 = cell_center({-2, 3}, 0.1);
  CHECK(c2.x == doctest::Approx(std::sqrt(3.0) * 0.1 * (-2 + 1.5)));
  CHECK(c2.y == doctest::Approx(0.45));
}

TEST_CASE("circumradius bound and nearest center") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 10000; ++k) {
    const Point p{u(rng), u(rng)};
    const Axial a = cell_index(p, 0.1);
    CHECK(distance(p, cell_center(a, 0.1)) <= 0.1 + 1e-12);
    const Axial b = nearest_by_scan(p, 0.1);
    CHECK(distance(p, cell_center(a, 0.1)) <=
          distance(p, cell_center(b, 0.1)) + 1e-12);
  }
}

TEST_CASE("index of a center is that cell") {
  for (int q = -50; q <= 50; ++q)
    for (int r = -50; r <= 50; ++r) CHECK(cell_index(cell_center({q, r}, 0.1), 0.1) == Axial{q, r});
}

TEST_CASE("edge points go to the smallest coordinate") {
  // Midpoint between centers (0,0) and (1,0) lies on their shared edge.
  const Point mid = midpoint(cell_center({0, 0}, 0.1), cell_center({1, 0}, 0.1));
  CHECK(cell_index(mid, 0.1) == Axial{0, 0});
}

TEST_CASE("occupied_cells") {
  std::vector<SensorNode> nodes{{1, {0.5, 0.5}, 1.0}, {2, {0.52, 0.51}, 1.0},
                                {3, {0.54, 0.52}, 1.0}, {4, {0.9, 0.9}, 1.0}};
  const Scenario s(Area{1, 1}, nodes, NetworkParams{});
  SUBCASE("head only") {
    CHECK(occupied_cells(s, Cluster{1, {}}, 0.1).cells.empty());
  }
  SUBCASE("nearby pair in one cell") {
    REQUIRE(cell_index(nodes[1].pos, 0.1) == cell_index(nodes[2].pos, 0.1));
    const CellPlan plan = occupied_cells(s, Cluster{1, {2, 3}}, 0.1);
    REQUIRE(plan.cells.size() == 1);
    CHECK(plan.cells[0].memberIds == std::vector<int>{2, 3});
  }
  SUBCASE("reference network partition") {
    const Scenario t = load_builtin_table1();
    const Clustering c = cluster(t, ClusterOptions{});
    for (const Cluster& cl : c.clusters) {
      const CellPlan plan = occupied_cells(t, cl, 0.1);
      std::vector<int> seen;
      for (const Cell& cell : plan.cells) {
        CHECK(!cell.memberIds.empty());
        for (int id : cell.memberIds) {
          CHECK(distance(t.node(id).pos, cell.hex.center) <= 0.1 + 1e-12);
          seen.push_back(id);
        }
      }
      std::sort(seen.begin(), seen.end());
      CHECK(seen == cl.memberIds);
    }
  }
}

TEST_CASE("reachable_stops") {
  const std::vector<Point> stops{cell_center({0, 0}, 0.1), cell_center({1, 0}, 0.1),
                                 {0.0, 0.1}};
  auto at0 = reachable_stops(stops[0], stops, 0.1);
  CHECK(std::find(at0.begin(), at0.end(), 0u) != at0.end());
  // (0, 0.1) is exactly one range away from the origin.
  auto edge = reachable_stops({0, 0}, stops, 0.1);
  CHECK(std::find(edge.begin(), edge.end(), 2u) != edge.end());
  // Point 0.087 from two neighbouring centers.
  const Point p{0.0866, 0.0};
  const Point q{0.17321 / 2, 0.0};
  auto near = reachable_stops(q, stops, 0.1);
  CHECK(std::find(near.begin(), near.end(), 0u) != near.end());
  CHECK(std::find(near.begin(), near.end(), 1u) != near.end());
  CHECK(distance(p, stops[0]) < 0.1);
}
