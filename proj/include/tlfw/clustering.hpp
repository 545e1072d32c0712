#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "tlfw/scenario.hpp"

namespace tlfw {

struct Cluster {
  int headId = 0;
  /// Normal nodes of the cluster, ascending; the head is not listed.
  std::vector<int> memberIds;

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

/// Partition of the network into clusters ordered by head id.
struct Clustering {
  std::vector<Cluster> clusters;

  std::size_t m() const { return clusters.size(); }
  std::vector<int> heads() const;
  /// Index into clusters of the cluster containing the node (head or member).
  std::size_t cluster_of(int nodeId) const;

  friend bool operator==(const Clustering&, const Clustering&) = default;
};

enum class HeadUpdate { CentroidSnap, ExactMedoid };

std::string_view to_string(HeadUpdate variant);
HeadUpdate head_update_from_string(std::string_view name);

/// Node id -> head id for every node of the scenario; heads map to themselves.
using Membership = std::map<int, int>;

/// Assigns each non-head node to the head minimizing its transmission cost
/// (C_ti * r_t); ties go to the lowest head id.
Membership assignment_step(const Scenario& scenario, std::span<const int> heads);

Clustering make_clustering(const Membership& membership);

/// Throws InputError unless the clustering partitions the scenario's nodes.
void validate_clustering(const Scenario& scenario, const Clustering& clustering);

/// New head per cluster, in the order of clustering.clusters.
std::vector<int> head_update_step(const Scenario& scenario, const Clustering& clustering,
                                  HeadUpdate variant);

/// Total transmission energy rate of normal nodes to their heads.
double comm_cost(const Scenario& scenario, const Clustering& clustering);

/// Distance-weighted (squared distance) initial head selection.
std::vector<int> seed_heads(const Scenario& scenario, std::size_t m, std::mt19937_64& rng);

struct ClusterRun {
  Clustering best;
  double bestCost = 0.0;
  /// comm_cost after every assignment step, in iteration order.
  std::vector<double> costHistory;
  std::size_t iterations = 0;
  bool converged = false;
};

/// One alternating assignment/head-update run from the given heads. Stops at a
/// head-set fixpoint or after maxIter iterations and keeps the best iterate.
ClusterRun run_clustering(const Scenario& scenario, std::vector<int> initialHeads,
                          std::size_t maxIter, HeadUpdate variant);

struct ClusterOptions {
  std::size_t m = 4;
  std::uint64_t seed = 42;
  std::size_t restarts = 16;
  std::size_t maxIter = 100;
  HeadUpdate variant = HeadUpdate::CentroidSnap;
  std::size_t jobs = 1;
};

/// Best of opts.restarts independent runs (lowest cost, then lowest run index).
Clustering cluster(const Scenario& scenario, const ClusterOptions& opts);

}  // namespace tlfw
