#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "tlfw/error.hpp"
#include "tlfw/scenario.hpp"
#include "tlfw/tour.hpp"
#include "oracles.hpp"

using namespace tlfw;
using tlfw::oracle::brute_force;

namespace {

std::vector<Point> random_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  return pts;
}

void check_cycle(const Tour& t, const std::vector<Point>& pts) {
  REQUIRE(t.order.size() == pts.size());
  std::vector<std::size_t> sorted = t.order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
  CHECK(t.order[0] == 0);
  for (std::size_t k = 0; k < pts.size(); ++k) CHECK(t.waypoints[k] == pts[t.order[k]]);
  CHECK(std::abs(tour_length(t) - t.length) <= 1e-12);
}

}  // namespace

TEST_CASE("trivial tours") {
  std::vector<Point> one{{0.3, 0.3}};
  CHECK(exact_tour(one).length == 0.0);
  CHECK(heuristic_tour(one, 1).length == 0.0);
  std::vector<Point> sq{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  CHECK(exact_tour(sq).length == doctest::Approx(4.0));
  CHECK(heuristic_tour(sq, 3).length == doctest::Approx(4.0));
  std::vector<Point> two{{0.1, 0.1}, {0.4, 0.5}};
  CHECK(exact_tour(two).length == doctest::Approx(1.0));
  std::vector<Point> line{{0.5, 0}, {0.1, 0}, {0.9, 0}, {0.3, 0}, {0.7, 0}};
  CHECK(heuristic_tour(line, 7).length == doctest::Approx(1.6));
  CHECK(exact_tour(line).length == doctest::Approx(1.6));
  CHECK_THROWS_AS(exact_tour(random_points(16, 1)), InputError);
}

TEST_CASE("exact tour matches permutation enumeration") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 2 + seed % 7;  // 2..8
    const auto pts = random_points(n, seed);
    const Tour t = exact_tour(pts);
    check_cycle(t, pts);
    CHECK(t.length == doctest::Approx(brute_force(pts)).epsilon(1e-12));
  }
}

TEST_CASE("heuristic is no better than exact and 2-opt stable") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t n = 3 + seed % 13;  // 3..15
    const auto pts = random_points(n, 1000 + seed);
    const Tour h = heuristic_tour(pts, seed);
    check_cycle(h, pts);
    CHECK(h.length >= exact_tour(pts).length - 1e-12);
    CHECK(two_opt_stable(h));
  }
}

TEST_CASE("heuristic determinism") {
  const auto pts = random_points(40, 5);
  CHECK(heuristic_tour(pts, 9).order == heuristic_tour(pts, 9).order);
  CHECK(shortest_tour(pts, 9).method == TourMethod::Heuristic);
  CHECK(shortest_tour(random_points(15, 5), 9).method == TourMethod::Exact);
}

TEST_CASE("reference network plus station") {
  const Scenario s = load_builtin_table1();
  std::vector<Point> pts{s.params().station};
  for (const auto& n : s.nodes()) pts.push_back(n.pos);
  const Tour t = heuristic_tour(pts, 42);
  check_cycle(t, pts);
  CHECK(two_opt_stable(t));
  CHECK(t.length <= 1.10 * 4.89);
}
