#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tlfw/geometry.hpp"

namespace tlfw {

inline constexpr std::size_t kExactTourLimit = 15;

enum class TourMethod { Exact, Heuristic };

std::string_view to_string(TourMethod method);

/// Closed cycle through a set of points; waypoints[0] is the anchor (input point 0).
struct Tour {
  std::vector<Point> waypoints;
  /// order[k] is the input index of waypoints[k].
  std::vector<std::size_t> order;
  double length = 0.0;
  TourMethod method = TourMethod::Exact;
};

double cycle_length(std::span<const Point> cycle);

/// Recomputes the closed length from the waypoints.
double tour_length(const Tour& tour);

/// Held-Karp over subsets; at most kExactTourLimit points.
Tour exact_tour(std::span<const Point> points);

/// Nearest neighbour from a seeded start, then 2-opt to local optimality.
Tour heuristic_tour(std::span<const Point> points, std::uint64_t seed);

/// exact_tour when the point count allows it, heuristic_tour otherwise.
Tour shortest_tour(std::span<const Point> points, std::uint64_t seed);

/// True if no single 2-opt exchange shortens the tour by more than tol.
bool two_opt_stable(const Tour& tour, double tol = 1e-12);

}  // namespace tlfw
