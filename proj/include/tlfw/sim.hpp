#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlfw/clustering.hpp"
#include "tlfw/schedule.hpp"
#include "tlfw/scenario.hpp"

namespace tlfw {

struct SimOptions {
  double dt = 0.05;
  std::size_t periods = 3;
  /// Spacing of stored samples; 0 picks one that keeps about 20000 rows. Minima and
  /// totals are tracked at every step regardless.
  double sampleInterval = 0.0;
};

enum class SimEventKind { Arrive, Charge, Depart };

std::string_view to_string(SimEventKind kind);

struct SimEvent {
  double time = 0.0;
  SimEventKind kind = SimEventKind::Arrive;
  std::string stop;
  Point position;
  /// Charge events: the stop duration.
  double duration = 0.0;
};

struct NodePeriodStats {
  double start = 0.0;
  double end = 0.0;
  double min = 0.0;
  double minTime = 0.0;
  double charged = 0.0;
  double consumed = 0.0;
};

struct Trace {
  double dt = 0.0;
  double period = 0.0;
  std::size_t periods = 0;
  double eMin = 0.0;
  double eMax = 0.0;
  std::vector<int> nodeIds;
  std::vector<double> times;
  /// energy[k][n]: battery of nodeIds[n] at times[k].
  std::vector<std::vector<double>> energy;
  std::vector<SimEvent> events;
  /// stats[p][n] for period p and node nodeIds[n].
  std::vector<std::vector<NodePeriodStats>> stats;
};

/// Replays the joint period: floor(h) head sub-periods with one cluster detour each
/// for the first m, then the fractional remainder as vacation at the station.
Trace simulate(const Scenario& scenario, const Clustering& clustering, const JointPlan& joint,
               const HeadLayerPlan& head, std::span<const ClusterPlan> clusters,
               const SimOptions& options = {});

/// Repeats the head-layer cycle alone; only the participants are tracked.
Trace simulate_head_layer(const Scenario& scenario, const HeadLayerPlan& head,
                          const SimOptions& options = {});

/// Repeats one cluster's cycle; the vehicle rests at the head between cell tours.
Trace simulate_cluster(const Scenario& scenario, const ClusterPlan& plan,
                       const SimOptions& options = {});

struct RenewFailure {
  enum class Kind { BelowMin, Declining };
  Kind kind = Kind::BelowMin;
  int nodeId = 0;
  std::size_t period = 0;
  double time = 0.0;
  double value = 0.0;
};

struct RenewVerdict {
  bool pass = true;
  double marginFrac = 0.0;
  double threshold = 0.0;
  double minEnergy = 0.0;
  int minNode = 0;
  double minTime = 0.0;
  std::vector<RenewFailure> failures;
};

/// Float slack on the lower threshold, as a fraction of E_max.
inline constexpr double kSimSlack = 1e-9;
/// Allowed period-to-period decline of the end energy, as a fraction of E_max.
inline constexpr double kDeclineTol = 1e-6;

RenewVerdict check_renewable(const Trace& trace, double marginFrac = 0.02);

std::string describe(const RenewVerdict& verdict);

void write_trace_csv(const Trace& trace, std::ostream& out);

}  // namespace tlfw
