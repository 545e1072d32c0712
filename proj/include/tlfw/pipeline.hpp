#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tlfw/clustering.hpp"
#include "tlfw/schedule.hpp"
#include "tlfw/scenario.hpp"
#include "tlfw/sim.hpp"

namespace tlfw {

struct RunSettings {
  HeadMode mode = HeadMode::TlfwHeads;
  std::size_t clusters = 4;
  std::uint64_t seed = 42;
  std::size_t restarts = 16;
  HeadUpdate variant = HeadUpdate::CentroidSnap;
  double segMax = 0.25;
  /// Unset means the mode default: full mesh for tlfw, 6 for msirsn.
  std::optional<std::size_t> pruneK;
  std::size_t jobs = 1;
  bool simulate = false;
  double dt = 0.05;
  std::size_t periods = 3;
  double marginFrac = 0.02;
  /// Free-form description of where the scenario came from, echoed in the report.
  std::string source;
  /// Debug output for the final head-layer LP; not part of the report.
  std::ostream* lpDump = nullptr;

  std::size_t prune_k() const;
};

struct SimulationSummary {
  double dt = 0.0;
  std::size_t periods = 0;
  RenewVerdict verdict;
};

/// Everything a run produced. Degenerate clusters (no consuming member) carry a plan
/// with no cells and an infinite cycle.
struct RunResult {
  RunResult(Scenario s, RunSettings st) : scenario(std::move(s)), settings(std::move(st)) {}

  Scenario scenario;
  RunSettings settings;
  std::optional<Clustering> clustering;
  double commCost = 0.0;
  std::vector<ClusterPlan> clusterPlans;
  std::optional<HeadLayerPlan> headPlan;
  std::optional<JointPlan> joint;
  std::optional<HeadLayerPlan> baseline;
  std::optional<SimulationSummary> simulation;
};

/// Plan for a cluster whose members consume nothing.
ClusterPlan degenerate_cluster_plan(const Scenario& scenario, const Cluster& cluster,
                                    std::size_t index);

/// Solves each cluster's plan, up to `jobs` at a time.
std::vector<ClusterPlan> solve_cluster_plans(const Scenario& scenario, const Clustering& clustering,
                                             std::uint64_t seed, std::size_t jobs);

/// Runs the configured pipeline, logging stage timings at debug level. Infeasibility
/// propagates as InfeasibleError; `partial` (when given) keeps whatever was computed
/// before the failure.
RunResult run_pipeline(const Scenario& scenario, const RunSettings& settings,
                       RunResult* partial = nullptr);

/// Re-simulates the plans held by a result.
SimulationSummary simulate_result(const RunResult& result, double dt, std::size_t periods,
                                  double marginFrac);

/// Trace of the plans held by a result, for export.
Trace trace_result(const RunResult& result, double dt, std::size_t periods);

}  // namespace tlfw
