#include "tlfw/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "tlfw/energy.hpp"
#include "tlfw/error.hpp"
#include "tlfw/random.hpp"

namespace tlfw {

namespace {

// Relative slack under which two costs count as tied.
constexpr double kTieTol = 1e-12;

bool strictly_less(double a, double b) { return a < b - kTieTol * std::max(1.0, std::abs(b)); }

double transmit_cost(const SensorNode& from, const SensorNode& head, const NetworkParams& p) {
  return link_cost(distance(from.pos, head.pos), p) * from.rate;
}

}  // namespace

std::vector<int> Clustering::heads() const {
  std::vector<int> h;
  h.reserve(clusters.size());
  for (const auto& c : clusters) h.push_back(c.headId);
  return h;
}

std::size_t Clustering::cluster_of(int nodeId) const {
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (clusters[i].headId == nodeId) return i;
    const auto& mem = clusters[i].memberIds;
    if (std::binary_search(mem.begin(), mem.end(), nodeId)) return i;
  }
  throw InputError(fmt::format("node {} is not part of the clustering", nodeId));
}

std::string_view to_string(HeadUpdate variant) {
  return variant == HeadUpdate::CentroidSnap ? "centroid-snap" : "exact-medoid";
}

HeadUpdate head_update_from_string(std::string_view name) {
  if (name == "centroid-snap") return HeadUpdate::CentroidSnap;
  if (name == "exact-medoid") return HeadUpdate::ExactMedoid;
  throw InputError(fmt::format("unknown clustering variant '{}'", name));
}

Membership assignment_step(const Scenario& scenario, std::span<const int> heads) {
  if (heads.empty()) throw InputError("assignment_step: at least one head is required");
  std::vector<int> sorted(heads.begin(), heads.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InputError("assignment_step: heads must be distinct");
  for (int h : sorted) scenario.index_of(h);

  const NetworkParams& p = scenario.params();
  Membership out;
  for (int h : sorted) out[h] = h;
  for (const SensorNode& n : scenario.nodes()) {
    if (out.count(n.id)) continue;
    int best = sorted.front();
    double bestCost = transmit_cost(n, scenario.node(best), p);
    for (std::size_t k = 1; k < sorted.size(); ++k) {
      const double c = transmit_cost(n, scenario.node(sorted[k]), p);
      if (strictly_less(c, bestCost)) {
        best = sorted[k];
        bestCost = c;
      }
    }
    out[n.id] = best;
  }
  return out;
}

Clustering make_clustering(const Membership& membership) {
  std::map<int, Cluster> byHead;
  for (const auto& [node, head] : membership) {
    Cluster& c = byHead[head];
    c.headId = head;
    if (node != head) c.memberIds.push_back(node);
  }
  Clustering out;
  for (auto& [head, c] : byHead) {
    if (!membership.count(head) || membership.at(head) != head)
      throw InputError(fmt::format("head {} is not assigned to itself", head));
    std::sort(c.memberIds.begin(), c.memberIds.end());
    out.clusters.push_back(std::move(c));
  }
  return out;
}

void validate_clustering(const Scenario& scenario, const Clustering& clustering) {
  if (clustering.clusters.empty()) throw InputError("clustering has no clusters");
  std::set<int> seen;
  int prevHead = std::numeric_limits<int>::min();
  for (const Cluster& c : clustering.clusters) {
    if (c.headId <= prevHead) throw InputError("clusters must be ordered by ascending head id");
    prevHead = c.headId;
    if (!scenario.contains(c.headId) || !seen.insert(c.headId).second)
      throw InputError(fmt::format("clustering: bad or repeated head {}", c.headId));
    if (!std::is_sorted(c.memberIds.begin(), c.memberIds.end()))
      throw InputError(fmt::format("clustering: members of head {} are not sorted", c.headId));
    for (int t : c.memberIds)
      if (!scenario.contains(t) || !seen.insert(t).second)
        throw InputError(fmt::format("clustering: bad or repeated member {}", t));
  }
  if (seen.size() != scenario.size())
    throw InputError(fmt::format("clustering covers {} of {} nodes", seen.size(), scenario.size()));
}

std::vector<int> head_update_step(const Scenario& scenario, const Clustering& clustering,
                                  HeadUpdate variant) {
  const NetworkParams& p = scenario.params();
  std::vector<int> heads;
  heads.reserve(clustering.m());
  for (const Cluster& c : clustering.clusters) {
    std::vector<int> nodes = c.memberIds;
    nodes.push_back(c.headId);
    std::sort(nodes.begin(), nodes.end());

    int best = nodes.front();
    if (variant == HeadUpdate::CentroidSnap) {
      Point centroid{0.0, 0.0};
      for (int id : nodes) {
        centroid.x += scenario.node(id).pos.x;
        centroid.y += scenario.node(id).pos.y;
      }
      centroid.x /= static_cast<double>(nodes.size());
      centroid.y /= static_cast<double>(nodes.size());
      double bestD = distance(scenario.node(best).pos, centroid);
      for (int id : nodes) {
        const double d = distance(scenario.node(id).pos, centroid);
        if (strictly_less(d, bestD)) {
          best = id;
          bestD = d;
        }
      }
    } else {
      double bestCost = 0.0;
      for (int cand : nodes) {
        double cost = 0.0;
        for (int t : nodes)
          if (t != cand) cost += transmit_cost(scenario.node(t), scenario.node(cand), p);
        if (cand == nodes.front() || strictly_less(cost, bestCost)) {
          best = cand;
          bestCost = cost;
        }
      }
    }
    heads.push_back(best);
  }
  return heads;
}

double comm_cost(const Scenario& scenario, const Clustering& clustering) {
  const NetworkParams& p = scenario.params();
  double total = 0.0;
  for (const Cluster& c : clustering.clusters) {
    const SensorNode& head = scenario.node(c.headId);
    for (int t : c.memberIds) total += transmit_cost(scenario.node(t), head, p);
  }
  return total;
}

std::vector<int> seed_heads(const Scenario& scenario, std::size_t m, std::mt19937_64& rng) {
  const auto& nodes = scenario.nodes();
  const std::size_t n = nodes.size();
  if (m == 0 || m > n)
    throw InputError(fmt::format("cluster count {} must lie in [1, {}]", m, n));

  std::vector<bool> chosen(n, false);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<int> heads;

  std::size_t first = std::min<std::size_t>(static_cast<std::size_t>(uniform01(rng) * n), n - 1);
  auto take = [&](std::size_t idx) {
    chosen[idx] = true;
    heads.push_back(nodes[idx].id);
    for (std::size_t k = 0; k < n; ++k) {
      const double d = distance(nodes[k].pos, nodes[idx].pos);
      nearest[k] = std::min(nearest[k], d * d);
    }
  };
  take(first);

  while (heads.size() < m) {
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (!chosen[k]) total += nearest[k];
    std::size_t pick = n;
    if (total > 0.0) {
      double target = uniform01(rng) * total;
      for (std::size_t k = 0; k < n; ++k) {
        if (chosen[k]) continue;
        pick = k;
        target -= nearest[k];
        if (target < 0.0) break;
      }
    } else {
      for (std::size_t k = 0; k < n; ++k)
        if (!chosen[k]) {
          pick = k;
          break;
        }
    }
    take(pick);
  }
  std::sort(heads.begin(), heads.end());
  return heads;
}

ClusterRun run_clustering(const Scenario& scenario, std::vector<int> heads, std::size_t maxIter,
                          HeadUpdate variant) {
  ClusterRun run;
  run.bestCost = std::numeric_limits<double>::infinity();
  std::sort(heads.begin(), heads.end());
  for (std::size_t iter = 0; iter < std::max<std::size_t>(maxIter, 1); ++iter) {
    Clustering current = make_clustering(assignment_step(scenario, heads));
    const double cost = comm_cost(scenario, current);
    run.costHistory.push_back(cost);
    ++run.iterations;
    if (strictly_less(cost, run.bestCost) || run.costHistory.size() == 1) {
      run.best = current;
      run.bestCost = cost;
    }
    std::vector<int> next = head_update_step(scenario, current, variant);
    std::sort(next.begin(), next.end());
    if (next == heads) {
      run.converged = true;
      break;
    }
    heads = std::move(next);
  }
  return run;
}

Clustering cluster(const Scenario& scenario, const ClusterOptions& opts) {
  if (opts.m == 0 || opts.m > scenario.size())
    throw InputError(
        fmt::format("cluster count {} must lie in [1, {}]", opts.m, scenario.size()));
  const std::size_t restarts = std::max<std::size_t>(opts.restarts, 1);

  auto one = [&](std::size_t run) {
    std::mt19937_64 rng(derive_seed(opts.seed, "clustering", run));
    return run_clustering(scenario, seed_heads(scenario, opts.m, rng), opts.maxIter,
                          opts.variant);
  };

  std::vector<ClusterRun> runs(restarts);
  if (opts.jobs > 1) {
    std::vector<std::future<ClusterRun>> pending;
    for (std::size_t r = 0; r < restarts; ++r) {
      pending.push_back(std::async(std::launch::async, one, r));
      if (pending.size() >= opts.jobs || r + 1 == restarts) {
        const std::size_t base = r + 1 - pending.size();
        for (std::size_t k = 0; k < pending.size(); ++k) runs[base + k] = pending[k].get();
        pending.clear();
      }
    }
  } else {
    for (std::size_t r = 0; r < restarts; ++r) runs[r] = one(r);
  }

  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r)
    if (strictly_less(runs[r].bestCost, runs[best].bestCost)) best = r;
  return runs[best].best;
}

}  // namespace tlfw
