#include "tlfw/energy.hpp"

#include <cmath>

#include <fmt/format.h>

namespace tlfw {

double link_cost(double d, const NetworkParams& params) {
  return params.beta1 + params.beta2 * std::pow(d, params.pathLossExp);
}

double node_consumption(double rate, double dToHead, const NetworkParams& params) {
  return (params.alpha + link_cost(dToHead, params)) * rate;
}

bool in_charge_range(double d, const NetworkParams& params) {
  // Closed range; the relative slack keeps exact-boundary constructions inside.
  return d <= params.dDelta * (1.0 + 1e-12);
}

double charge_rate(double d, const NetworkParams& params) {
  if (!in_charge_range(d, params)) return 0.0;
  return params.efficiency(d) * params.uMax;
}

double logical_rate(double consumption, double chargeRate) {
  if (!(chargeRate > 0.0)) throw UnchargeableNodeError("unchargeable node: charge rate is zero");
  return consumption / chargeRate;
}

double member_rate(const Cluster& cluster, const Scenario& scenario) {
  double s = 0.0;
  for (int t : cluster.memberIds) s += scenario.node(t).rate;
  return s;
}

double cluster_ingress_rate(const Cluster& cluster, const Scenario& scenario) {
  return member_rate(cluster, scenario) + scenario.node(cluster.headId).rate;
}

double sensor_layer_energy(const Scenario& scenario, const Clustering& clustering) {
  double total = 0.0;
  for (const Cluster& c : clustering.clusters) {
    const Point head = scenario.node(c.headId).pos;
    for (int t : c.memberIds) {
      const SensorNode& n = scenario.node(t);
      total += node_consumption(n.rate, distance(n.pos, head), scenario.params());
    }
  }
  return total;
}

double cluster_logical_rate(const Scenario& scenario, const Cluster& cluster,
                            const CellPlan& cells) {
  const NetworkParams& p = scenario.params();
  const Point head = scenario.node(cluster.headId).pos;
  double total = 0.0;
  for (const Cell& cell : cells.cells) {
    for (int t : cell.memberIds) {
      const SensorNode& n = scenario.node(t);
      const double u = charge_rate(distance(n.pos, cell.hex.center), p);
      if (!(u > 0.0))
        throw UnchargeableNodeError(fmt::format("unchargeable node {}", t), {t});
      total += logical_rate(node_consumption(n.rate, distance(n.pos, head), p), u);
    }
  }
  return total;
}

double head_consumption_rate(int headId, double memberRate, Point vehiclePos,
                             const FlowPattern& flows, const Scenario& scenario) {
  const NetworkParams& p = scenario.params();
  const SensorNode& head = scenario.node(headId);
  double c = p.alpha * head.rate + p.rho * memberRate;
  for (const Relay& f : flows.relays) {
    if (f.to == headId) c += p.rho * f.rate;
    if (f.from == headId)
      c += link_cost(distance(head.pos, scenario.node(f.to).pos), p) * f.rate;
  }
  if (auto it = flows.toStation.find(headId); it != flows.toStation.end())
    c += link_cost(distance(head.pos, vehiclePos), p) * it->second;
  return c;
}

double head_consumption_rate(int headId, Point vehiclePos, const FlowPattern& flows,
                             const Clustering& clustering, const Scenario& scenario) {
  const Cluster& c = clustering.clusters[clustering.cluster_of(headId)];
  return head_consumption_rate(headId, member_rate(c, scenario), vehiclePos, flows, scenario);
}

double head_charge_rate(Point headPos, Point vehiclePos, const NetworkParams& params) {
  return distance(headPos, vehiclePos) <= kColocationTol ? params.uMax : 0.0;
}

}  // namespace tlfw
