#pragma once

#include <map>
#include <vector>

#include "tlfw/clustering.hpp"
#include "tlfw/error.hpp"
#include "tlfw/geometry.hpp"
#include "tlfw/hexgrid.hpp"
#include "tlfw/scenario.hpp"

namespace tlfw {

/// Raised when a node lies outside the charging range of every stop.
class UnchargeableNodeError : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

struct Relay {
  int from = 0;
  int to = 0;
  double rate = 0.0;
};

/// Head-layer routing for one vehicle position, in bits per unit time.
struct FlowPattern {
  std::map<int, double> toStation;
  std::vector<Relay> relays;
};

/// Joule per bit sent over distance d: beta1 + beta2 * d^omega.
double link_cost(double d, const NetworkParams& params);

/// Normal node energy rate: sensing plus single-hop transmission to its head.
double node_consumption(double rate, double dToHead, const NetworkParams& params);

bool in_charge_range(double d, const NetworkParams& params);

/// Power received at distance d from the vehicle; zero beyond the charging range.
double charge_rate(double d, const NetworkParams& params);

/// Fraction of time a node must be charged: consumption over charge rate.
double logical_rate(double consumption, double chargeRate);

/// Total data leaving a cluster head: member rates plus its own.
double cluster_ingress_rate(const Cluster& cluster, const Scenario& scenario);

double member_rate(const Cluster& cluster, const Scenario& scenario);

/// Sensing plus transmission energy rate of every normal node.
double sensor_layer_energy(const Scenario& scenario, const Clustering& clustering);

/// Sum of logical rates of a cluster's normal nodes, each charged from its own cell center.
double cluster_logical_rate(const Scenario& scenario, const Cluster& cluster,
                            const CellPlan& cells);

/// Head energy rate for the given routing with the vehicle at vehiclePos.
double head_consumption_rate(int headId, double memberRate, Point vehiclePos,
                             const FlowPattern& flows, const Scenario& scenario);
double head_consumption_rate(int headId, Point vehiclePos, const FlowPattern& flows,
                             const Clustering& clustering, const Scenario& scenario);

/// Heads are only charged while the vehicle sits on them.
double head_charge_rate(Point headPos, Point vehiclePos, const NetworkParams& params);

inline constexpr double kColocationTol = 1e-9;

}  // namespace tlfw
