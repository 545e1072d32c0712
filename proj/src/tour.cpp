#include "tlfw/tour.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "tlfw/error.hpp"
#include "tlfw/random.hpp"

namespace tlfw {

namespace {

Tour make_tour(std::span<const Point> points, std::vector<std::size_t> order, TourMethod method) {
  Tour t;
  t.order = std::move(order);
  t.method = method;
  t.waypoints.reserve(t.order.size());
  for (std::size_t idx : t.order) t.waypoints.push_back(points[idx]);
  t.length = cycle_length(t.waypoints);
  return t;
}


constexpr double kImproveTol = 1e-12;

// First-improvement 2-opt until no exchange helps. Returns true if anything changed.
bool two_opt_pass(std::span<const Point> points, std::vector<std::size_t>& cyc) {
  const std::size_t n = cyc.size();
  auto P = [&](std::size_t pos) { return points[cyc[pos % n]]; };
  bool changed = false;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i + 1 < n && !improved; ++i) {
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;
        const double delta = distance(P(i), P(j)) + distance(P(i + 1), P(j + 1)) -
                             distance(P(i), P(i + 1)) - distance(P(j), P(j + 1));
        if (delta < -kImproveTol) {
          std::reverse(cyc.begin() + static_cast<std::ptrdiff_t>(i + 1),
                       cyc.begin() + static_cast<std::ptrdiff_t>(j + 1));
          improved = changed = true;
          break;
        }
      }
    }
  }
  return changed;
}

// Moves one chain of 1 to 3 consecutive points elsewhere, possibly reversed.
// Applies the first improving move found and returns whether one existed.
bool or_opt_pass(std::span<const Point> points, std::vector<std::size_t>& cyc) {
  const std::size_t n = cyc.size();
  auto P = [&](std::size_t pos) { return points[cyc[pos % n]]; };
  for (std::size_t len = 1; len <= 3 && len + 2 < n; ++len) {
    for (std::size_t i = 0; i < n; ++i) {
      // Chain occupies positions i .. i+len-1 (cyclic); a and b are its outside neighbours.
      const std::size_t a = (i + n - 1) % n, b = (i + len) % n;
      const Point first = P(i), last = P(i + len - 1);
      const double removeGain =
          distance(P(a), first) + distance(last, P(b)) - distance(P(a), P(b));
      for (std::size_t k = 0; k + len + 1 < n; ++k) {
        // Insert between positions p and p+1, both outside the chain.
        const std::size_t p = (b + k) % n, q = (p + 1) % n;
        const double fwd = distance(P(p), first) + distance(last, P(q)) - distance(P(p), P(q));
        const double rev = distance(P(p), last) + distance(first, P(q)) - distance(P(p), P(q));
        const bool reversed = rev < fwd;
        if (std::min(fwd, rev) - removeGain < -kImproveTol) {
          std::vector<std::size_t> chain, rest;
          for (std::size_t t = 0; t < len; ++t) chain.push_back(cyc[(i + t) % n]);
          if (reversed) std::reverse(chain.begin(), chain.end());
          for (std::size_t t = 0; t + len < n; ++t) {
            const std::size_t pos = (b + t) % n;
            rest.push_back(cyc[pos]);
            if (pos == p) rest.insert(rest.end(), chain.begin(), chain.end());
          }
          cyc = std::move(rest);
          return true;
        }
      }
    }
  }
  return false;
}

}  // namespace

std::string_view to_string(TourMethod method) {
  return method == TourMethod::Exact ? "exact" : "heuristic";
}

double cycle_length(std::span<const Point> cycle) {
  if (cycle.size() < 2) return 0.0;
  double len = 0.0;
  for (std::size_t k = 0; k < cycle.size(); ++k)
    len += distance(cycle[k], cycle[(k + 1) % cycle.size()]);
  return len;
}

double tour_length(const Tour& tour) { return cycle_length(tour.waypoints); }

Tour exact_tour(std::span<const Point> points) {
  const std::size_t n = points.size();
  if (n == 0) throw InputError("exact_tour: at least one point is required");
  if (n > kExactTourLimit)
    throw InputError(fmt::format(
        "exact_tour: {} points exceed the exact limit of {}; use heuristic_tour", n,
        kExactTourLimit));
  if (n <= 2) {
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    return make_tour(points, std::move(order), TourMethod::Exact);
  }

  // cost[mask][j]: shortest path from point j through every point in mask back
  // to the anchor. Bit b of mask stands for point b + 1.
  const std::size_t k = n - 1;
  const std::size_t full = (std::size_t{1} << k) - 1;
  std::vector<double> d(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) d[a * n + b] = distance(points[a], points[b]);

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost((full + 1) * n, inf);
  auto at = [&](std::size_t mask, std::size_t j) -> double& { return cost[mask * n + j]; };
  for (std::size_t j = 1; j < n; ++j) at(0, j) = d[j * n];
  for (std::size_t mask = 1; mask <= full; ++mask) {
    for (std::size_t j = 1; j < n; ++j) {
      if (mask & (std::size_t{1} << (j - 1))) continue;
      double best = inf;
      for (std::size_t l = 1; l < n; ++l) {
        const std::size_t bit = std::size_t{1} << (l - 1);
        if (!(mask & bit)) continue;
        best = std::min(best, d[j * n + l] + at(mask ^ bit, l));
      }
      at(mask, j) = best;
    }
  }

  // Walk forward taking the smallest-index successor that stays optimal.
  std::vector<std::size_t> order{0};
  std::size_t cur = 0;
  std::size_t remaining = full;
  while (remaining) {
    double best = inf;
    for (std::size_t j = 1; j < n; ++j) {
      const std::size_t bit = std::size_t{1} << (j - 1);
      if (remaining & bit) best = std::min(best, d[cur * n + j] + at(remaining ^ bit, j));
    }
    const double tol = 1e-12 * std::max(1.0, best);
    for (std::size_t j = 1; j < n; ++j) {
      const std::size_t bit = std::size_t{1} << (j - 1);
      if ((remaining & bit) && d[cur * n + j] + at(remaining ^ bit, j) <= best + tol) {
        order.push_back(j);
        remaining ^= bit;
        cur = j;
        break;
      }
    }
  }
  return make_tour(points, std::move(order), TourMethod::Exact);
}

Tour heuristic_tour(std::span<const Point> points, std::uint64_t seed) {
  const std::size_t n = points.size();
  if (n == 0) throw InputError("heuristic_tour: at least one point is required");
  if (n <= 3) {
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    return make_tour(points, std::move(order), TourMethod::Heuristic);
  }

  std::mt19937_64 rng(derive_seed(seed, "tour"));
  const std::size_t start = std::min<std::size_t>(static_cast<std::size_t>(uniform01(rng) * n), n - 1);

  std::vector<std::size_t> cyc{start};
  std::vector<bool> used(n, false);
  used[start] = true;
  while (cyc.size() < n) {
    const Point here = points[cyc.back()];
    std::size_t next = n;
    double bestD = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double dj = distance(here, points[j]);
      if (dj < bestD) {
        bestD = dj;
        next = j;
      }
    }
    used[next] = true;
    cyc.push_back(next);
  }

  while (two_opt_pass(points, cyc) || or_opt_pass(points, cyc)) {
  }

  const auto anchor = std::find(cyc.begin(), cyc.end(), std::size_t{0});
  std::rotate(cyc.begin(), anchor, cyc.end());
  return make_tour(points, std::move(cyc), TourMethod::Heuristic);
}

Tour shortest_tour(std::span<const Point> points, std::uint64_t seed) {
  return points.size() <= kExactTourLimit ? exact_tour(points) : heuristic_tour(points, seed);
}

bool two_opt_stable(const Tour& tour, double tol) {
  const auto& w = tour.waypoints;
  const std::size_t n = w.size();
  if (n < 4) return true;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      const double delta = distance(w[i], w[j]) + distance(w[i + 1], w[(j + 1) % n]) -
                           distance(w[i], w[i + 1]) - distance(w[j], w[(j + 1) % n]);
      if (delta < -tol) return false;
    }
  }
  return true;
}

}  // namespace tlfw
