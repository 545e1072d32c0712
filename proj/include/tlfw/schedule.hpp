#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "tlfw/clustering.hpp"
#include "tlfw/energy.hpp"
#include "tlfw/hexgrid.hpp"
#include "tlfw/lp.hpp"
#include "tlfw/scenario.hpp"
#include "tlfw/tour.hpp"

namespace tlfw {

enum class EpochKind { Stop, Vacation, Move };

std::string_view to_string(EpochKind kind);

struct Epoch {
  EpochKind kind = EpochKind::Vacation;
  /// Stop: index of the stop. Move: index of the tour edge (waypoint k to k+1).
  std::size_t index = 0;
  /// Stop point, station, or segment midpoint.
  Point position;
  /// Move epochs only: travel time of the segment.
  double fixedDuration = 0.0;
  double length = 0.0;
};

/// Splits a closed tour into a timeline: vacation at the station, then for each
/// edge its move segments followed by the stop at the edge's end. Waypoint 0 is the
/// station; waypoint k > 0 is stop tour.order[k] - 1.
std::vector<Epoch> build_epochs(const Tour& tour, Point station, double segMax, double speed);

/// Figures the solver reports so a run can be audited.
struct SolveDiagnostics {
  std::size_t iterations = 0;
  std::size_t rounds = 1;
  std::size_t rows = 0;
  std::size_t columns = 0;
  std::size_t candidateColumns = 0;
  double maxViolation = 0.0;
  double maxNegativity = 0.0;
  /// Nodes whose dip constraint is tight at the optimum.
  std::vector<int> bindingNodes;
};

struct ClusterPlan {
  std::size_t clusterIndex = 0;
  int headId = 0;
  CellPlan cells;
  /// Head first, then the occupied cell centers.
  Tour tour;
  /// Per cell of `cells`, in the same order.
  std::vector<double> stopDurations;
  double cycleTime = 0.0;
  double vacation = 0.0;
  double travelTime = 0.0;
  double chargeFraction = 0.0;
  double maxCycle = 0.0;
  double objective = 0.0;
  /// Sum of logical rates, each node charged from its own cell center.
  double logicalRate = 0.0;
  SolveDiagnostics diag;

  double charge_time() const;
};

/// Solves the per-cluster vacation-maximizing schedule for the cluster's normal nodes.
/// Throws DegenerateError if no member consumes energy, UnchargeableNodeError if a
/// member is out of reach, InfeasibleError otherwise when no schedule exists.
ClusterPlan solve_cluster_plan(const Scenario& scenario, const Cluster& cluster,
                               const CellPlan& cells, std::uint64_t seed = 42,
                               const lp::Options& lpOptions = {});

enum class ChargeModel { Colocation, Ranged };
enum class HeadMode { TlfwHeads, MsirsnBaseline };

std::string_view to_string(ChargeModel model);
std::string_view to_string(HeadMode mode);

/// A node taking part in the head-layer routing.
struct Participant {
  int id = 0;
  /// Data the node must deliver per unit time, its own plus its members'.
  double ingress = 0.0;
  /// Data received from cluster members per unit time.
  double memberRate = 0.0;
};

std::vector<Participant> head_participants(const Scenario& scenario, const Clustering& clustering);
std::vector<Participant> baseline_participants(const Scenario& scenario);

/// Occupied cell centers of a global grid over every node.
std::vector<Point> baseline_stops(const Scenario& scenario, double side);

struct HeadPlanOptions {
  HeadMode mode = HeadMode::TlfwHeads;
  ChargeModel chargeModel = ChargeModel::Colocation;
  /// Relay arcs per node toward its nearest participants; 0 keeps the full mesh.
  std::size_t pruneK = 0;
  double segMax = 0.25;
  std::uint64_t seed = 42;
  /// Candidate relay columns up to this count go into a single solve.
  std::size_t fullColumnLimit = 3000;
  /// Columns added per pricing round.
  std::size_t columnBatch = 400;
  bool forceColumnGeneration = false;
  lp::Options lp;
  /// When set, the final LP is written here in the text dump format.
  std::ostream* lpDump = nullptr;
};

struct HeadLayerPlan {
  HeadMode mode = HeadMode::TlfwHeads;
  ChargeModel chargeModel = ChargeModel::Colocation;
  std::vector<Participant> participants;
  std::vector<Point> stops;
  /// Station first, then the stops.
  Tour tour;
  /// Per stop, in `stops` order.
  std::vector<double> stopDurations;
  double vacation = 0.0;
  double cycleTime = 0.0;
  double travelTime = 0.0;
  double objective = 0.0;
  std::vector<Epoch> epochs;
  std::vector<double> epochDurations;
  std::vector<FlowPattern> flows;
  std::size_t pruneK = 0;
  double segMax = 0.25;
  SolveDiagnostics diag;

  double charge_time() const;
};

HeadLayerPlan solve_head_plan(const Scenario& scenario, std::span<const Point> stops,
                              std::span<const Participant> participants,
                              const HeadPlanOptions& options);

/// Head layer of a clustered network: stops at the heads, charging by co-location.
HeadLayerPlan solve_tlfw_head_plan(const Scenario& scenario, const Clustering& clustering,
                                   HeadPlanOptions options = {});
/// Single-layer comparison: every node routes, stops at occupied global cells,
/// charging by range.
HeadLayerPlan solve_baseline_plan(const Scenario& scenario, HeadPlanOptions options = {});

/// Cluster figures the joint composition needs.
struct ClusterSummary {
  double cycleTime = std::numeric_limits<double>::infinity();
  double chargeTime = 0.0;
  double travelTime = 0.0;
  double maxCycle = std::numeric_limits<double>::infinity();
  std::vector<double> stopDurations;
  int headId = 0;
};

struct HeadSummary {
  double cycleTime = 0.0;
  double vacation = 0.0;
  double chargeTime = 0.0;
  double travelTime = 0.0;
};

ClusterSummary summarize(const ClusterPlan& plan);
HeadSummary summarize(const HeadLayerPlan& plan);

struct JointBreakdown {
  double headChargeTime = 0.0;
  double headTravelTime = 0.0;
  double normalChargeTime = 0.0;
  double normalTravelTime = 0.0;
};

struct JointPlan {
  double period = 0.0;
  double subPeriods = 0.0;
  /// Cluster index served in each of the first m sub-periods.
  std::vector<std::size_t> subPeriodAssignment;
  std::vector<double> scaledChargeTimes;
  std::vector<std::vector<double>> scaledStopDurations;
  JointBreakdown breakdown;
  double vacation = 0.0;
  double objective = 0.0;
  /// Node-layer bound on T and the vacation-budget bound, before taking the minimum.
  double cycleBound = 0.0;
  double budgetBound = 0.0;
};

/// Combines per-cluster plans with the head plan into one period.
JointPlan solve_joint(std::span<const ClusterSummary> clusters, const HeadSummary& head,
                      std::size_t m);

}  // namespace tlfw
