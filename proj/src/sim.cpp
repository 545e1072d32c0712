#include "tlfw/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "tlfw/energy.hpp"
#include "tlfw/error.hpp"

namespace tlfw {

std::string_view to_string(SimEventKind kind) {
  switch (kind) {
    case SimEventKind::Arrive: return "arrive";
    case SimEventKind::Charge: return "charge";
    case SimEventKind::Depart: return "depart";
  }
  return "?";
}

namespace {

constexpr std::size_t kTargetSamples = 20000;

enum class ChargeMode { None, Colocation, Ranged };

struct Segment {
  double duration = 0.0;
  Point from, to;
  bool moving = false;
  // Index into the head plan's flow patterns, or -1 when no node routes.
  long flow = -1;
  ChargeMode charge = ChargeMode::None;
  std::string stop;
};

Segment rest(Point at, double duration, long flow) {
  return Segment{duration, at, at, false, flow, ChargeMode::None, {}};
}

Segment move(Point a, Point b, double duration, long flow) {
  return Segment{duration, a, b, true, flow, ChargeMode::None, {}};
}

Segment stop(Point at, double duration, long flow, ChargeMode mode, std::string label) {
  return Segment{duration, at, at, false, flow, mode, std::move(label)};
}

struct Tracked {
  int id = 0;
  Point pos;
  bool routed = false;
  double memberRate = 0.0;
  double constant = 0.0;
};

class Engine {
 public:
  Engine(const Scenario& scenario, std::vector<Tracked> nodes,
         const std::vector<FlowPattern>* flows, const SimOptions& options)
      : s_(scenario), p_(scenario.params()), nodes_(std::move(nodes)), opt_(options) {
    if (!(opt_.dt > 0.0)) throw InputError("sim: dt must be > 0");
    if (opt_.periods < 2) throw InputError("sim: at least 2 periods are required");
    if (!flows) return;
    const std::size_t n = nodes_.size();
    base_.assign(flows->size(), std::vector<double>(n, 0.0));
    direct_.assign(flows->size(), std::vector<double>(n, 0.0));
    for (std::size_t e = 0; e < flows->size(); ++e) {
      FlowPattern relaysOnly{{}, (*flows)[e].relays};
      for (std::size_t k = 0; k < n; ++k) {
        if (!nodes_[k].routed) continue;
        base_[e][k] = head_consumption_rate(nodes_[k].id, nodes_[k].memberRate, nodes_[k].pos,
                                            relaysOnly, s_);
        auto it = (*flows)[e].toStation.find(nodes_[k].id);
        if (it != (*flows)[e].toStation.end()) direct_[e][k] = it->second;
      }
    }
  }

  Trace run(const std::vector<Segment>& period) {
    double minStop = std::numeric_limits<double>::infinity();
    double length = 0.0;
    for (const Segment& g : period) {
      if (g.duration < 0.0) throw InputError("sim: negative segment duration");
      length += g.duration;
    }
    for (const Segment& g : period)
      if (!g.stop.empty() && g.duration > 1e-9 * length) minStop = std::min(minStop, g.duration);
    if (opt_.dt > minStop)
      throw InputError(fmt::format("sim: dt {} exceeds the shortest stop duration {:.6g}",
                                   opt_.dt, minStop));
    for (const Segment& g : period)
      if (g.flow >= static_cast<long>(base_.size()) ||
          (g.flow < 0 && std::any_of(nodes_.begin(), nodes_.end(),
                                     [](const Tracked& t) { return t.routed; })))
        throw InputError("sim: segment without a flow pattern for routed nodes");

    Trace tr;
    tr.dt = opt_.dt;
    tr.period = length;
    tr.periods = opt_.periods;
    tr.eMin = p_.eMin;
    tr.eMax = p_.eMax;
    const std::size_t n = nodes_.size();
    for (const Tracked& t : nodes_) tr.nodeIds.push_back(t.id);
    const double horizon = length * static_cast<double>(opt_.periods);
    const double every = opt_.sampleInterval > 0.0
                             ? opt_.sampleInterval
                             : std::max(opt_.dt, horizon / static_cast<double>(kTargetSamples));

    std::vector<double> e(n, p_.eMax);
    std::vector<double> c(n), u(n);
    double t = 0.0, nextSample = every;
    tr.times.push_back(0.0);
    tr.energy.push_back(e);

    for (std::size_t per = 0; per < opt_.periods; ++per) {
      std::vector<NodePeriodStats> st(n);
      for (std::size_t k = 0; k < n; ++k) st[k] = {e[k], e[k], e[k], t, 0.0, 0.0};
      for (const Segment& g : period) {
        if (g.duration <= 0.0) continue;
        if (!g.stop.empty()) {
          tr.events.push_back({t, SimEventKind::Arrive, g.stop, g.from, 0.0});
          tr.events.push_back({t, SimEventKind::Charge, g.stop, g.from, g.duration});
        }
        const auto steps = static_cast<std::size_t>(
            std::max(1.0, std::ceil(g.duration / opt_.dt - 1e-9)));
        const double h = g.duration / static_cast<double>(steps);
        for (std::size_t k = 0; k < n; ++k) u[k] = charge_of(nodes_[k], g);
        for (std::size_t step = 0; step < steps; ++step) {
          const Point q =
              g.moving ? lerp(g.from, g.to, (static_cast<double>(step) + 0.5) / steps) : g.from;
          const double tEnd = t + h;
          for (std::size_t k = 0; k < n; ++k) {
            c[k] = consumption(k, g.flow, q);
            const double before = e[k];
            e[k] = std::min(p_.eMax, before + (u[k] - c[k]) * h);
            st[k].consumed += c[k] * h;
            st[k].charged += e[k] - before + c[k] * h;
            if (e[k] < st[k].min) {
              st[k].min = e[k];
              st[k].minTime = tEnd;
            }
          }
          t = tEnd;
          if (t >= nextSample - 1e-12 * horizon) {
            tr.times.push_back(t);
            tr.energy.push_back(e);
            while (nextSample <= t + 1e-12 * horizon) nextSample += every;
          }
        }
        if (!g.stop.empty()) tr.events.push_back({t, SimEventKind::Depart, g.stop, g.from, 0.0});
      }
      for (std::size_t k = 0; k < n; ++k) st[k].end = e[k];
      tr.stats.push_back(std::move(st));
    }
    if (tr.times.back() < t) {
      tr.times.push_back(t);
      tr.energy.push_back(e);
    }
    return tr;
  }

 private:
  double consumption(std::size_t k, long flow, Point q) const {
    const Tracked& t = nodes_[k];
    if (!t.routed) return t.constant;
    return base_[flow][k] + link_cost(distance(t.pos, q), p_) * direct_[flow][k];
  }

  double charge_of(const Tracked& t, const Segment& g) const {
    switch (g.charge) {
      case ChargeMode::None: return 0.0;
      case ChargeMode::Colocation: return head_charge_rate(t.pos, g.from, p_);
      case ChargeMode::Ranged: return charge_rate(distance(t.pos, g.from), p_);
    }
    return 0.0;
  }

  const Scenario& s_;
  const NetworkParams& p_;
  std::vector<Tracked> nodes_;
  SimOptions opt_;
  std::vector<std::vector<double>> base_, direct_;
};

void check_head_plan(const HeadLayerPlan& head) {
  const std::size_t E = head.epochs.size();
  if (head.epochDurations.size() != E || head.flows.size() != E)
    throw InputError("sim: head plan epochs, durations and flows disagree in length");
  if (head.stopDurations.size() != head.stops.size() || head.tour.waypoints.size() != head.stops.size() + 1)
    throw InputError("sim: head plan stops and tour disagree");
  for (const Epoch& ep : head.epochs)
    if ((ep.kind == EpochKind::Stop && ep.index >= head.stops.size()) ||
        (ep.kind == EpochKind::Move && ep.index >= head.tour.waypoints.size()))
      throw InputError("sim: head plan epoch refers to a missing stop or edge");
}

long vacation_epoch(const HeadLayerPlan& head) {
  for (std::size_t e = 0; e < head.epochs.size(); ++e)
    if (head.epochs[e].kind == EpochKind::Vacation) return static_cast<long>(e);
  throw InputError("sim: head plan has no vacation epoch");
}

std::vector<Tracked> routed_nodes(const Scenario& scenario, const HeadLayerPlan& head) {
  std::vector<Tracked> out;
  for (const Participant& a : head.participants)
    out.push_back({a.id, scenario.node(a.id).pos, true, a.memberRate, 0.0});
  return out;
}

// One head cycle. `detour(stopIndex)` returns segments to run after that stop's
// charge; `vacation` overrides the rest at the station.
template <class Detour>
std::vector<Segment> head_cycle(const HeadLayerPlan& head, double vacation, Detour&& detour) {
  const ChargeMode mode =
      head.chargeModel == ChargeModel::Colocation ? ChargeMode::Colocation : ChargeMode::Ranged;
  const auto& wp = head.tour.waypoints;
  std::map<std::size_t, std::size_t> piecesOf;
  for (const Epoch& ep : head.epochs)
    if (ep.kind == EpochKind::Move) ++piecesOf[ep.index];
  std::map<std::size_t, std::size_t> seen;

  std::vector<Segment> out;
  for (std::size_t e = 0; e < head.epochs.size(); ++e) {
    const Epoch& ep = head.epochs[e];
    const long fe = static_cast<long>(e);
    switch (ep.kind) {
      case EpochKind::Vacation: out.push_back(rest(ep.position, vacation, fe)); break;
      case EpochKind::Move: {
        const Point a = wp[ep.index], b = wp[(ep.index + 1) % wp.size()];
        const double P = static_cast<double>(piecesOf[ep.index]);
        const double j = static_cast<double>(seen[ep.index]++);
        out.push_back(move(lerp(a, b, j / P), lerp(a, b, (j + 1) / P), head.epochDurations[e], fe));
        break;
      }
      case EpochKind::Stop: {
        out.push_back(stop(head.stops[ep.index], head.epochDurations[e], fe, mode,
                           fmt::format("stop {}", ep.index)));
        auto extra = detour(ep.index);
        out.insert(out.end(), extra.begin(), extra.end());
        break;
      }
    }
  }
  return out;
}

// The cell tour of one cluster starting and ending at its head.
std::vector<Segment> cluster_tour(const ClusterPlan& plan, std::span<const double> durations,
                                  double speed, long flow) {
  const auto& wp = plan.tour.waypoints;
  std::vector<Segment> out;
  if (wp.size() < 2) return out;
  for (std::size_t k = 0; k < wp.size(); ++k) {
    const Point a = wp[k], b = wp[(k + 1) % wp.size()];
    out.push_back(move(a, b, distance(a, b) / speed, flow));
    if (k + 1 == wp.size()) break;
    const std::size_t cell = plan.tour.order[k + 1] - 1;
    out.push_back(stop(b, durations[cell], flow, ChargeMode::Ranged,
                       fmt::format("cluster {} cell {}", plan.headId, cell)));
  }
  return out;
}

double segments_time(const std::vector<Segment>& segs) {
  double s = 0.0;
  for (const Segment& g : segs) s += g.duration;
  return s;
}

}  // namespace

Trace simulate(const Scenario& scenario, const Clustering& clustering, const JointPlan& joint,
               const HeadLayerPlan& head, std::span<const ClusterPlan> clusters,
               const SimOptions& options) {
  check_head_plan(head);
  const std::size_t m = clustering.m();
  if (clusters.size() != m || joint.scaledStopDurations.size() != m ||
      joint.subPeriodAssignment.size() != m)
    throw InputError(fmt::format("sim: {} cluster plans for {} clusters", clusters.size(), m));
  if (head.participants.size() != m)
    throw InputError("sim: head plan participants do not match the clustering");
  std::map<int, std::size_t> stopOfHead;
  for (std::size_t i = 0; i < m; ++i) {
    const Cluster& c = clustering.clusters[i];
    if (clusters[i].headId != c.headId || head.participants[i].id != c.headId)
      throw InputError(fmt::format("sim: plan for cluster {} does not belong to head {}", i, c.headId));
    if (joint.scaledStopDurations[i].size() != clusters[i].cells.cells.size())
      throw InputError(fmt::format("sim: cluster of head {} has mismatched stop durations", c.headId));
    for (std::size_t s = 0; s < head.stops.size(); ++s)
      if (distance(head.stops[s], scenario.node(c.headId).pos) <= kColocationTol) stopOfHead[c.headId] = s;
    if (!stopOfHead.count(c.headId))
      throw InputError(fmt::format("sim: head {} has no stop on the head tour", c.headId));
  }
  if (!(joint.subPeriods >= static_cast<double>(m)))
    throw InputError("sim: the joint plan has fewer sub-periods than clusters");

  const NetworkParams& p = scenario.params();
  const long vac = vacation_epoch(head);
  const auto full = static_cast<std::size_t>(std::floor(joint.subPeriods + 1e-9));

  std::vector<Segment> period;
  for (std::size_t j = 0; j < full; ++j) {
    std::vector<Segment> detour;
    std::size_t at = head.stops.size();
    if (j < m) {
      const std::size_t i = joint.subPeriodAssignment[j];
      if (i >= m) throw InputError("sim: sub-period assignment out of range");
      detour = cluster_tour(clusters[i], joint.scaledStopDurations[i], p.speed, vac);
      at = stopOfHead.at(clusters[i].headId);
    }
    const double vacation = head.vacation - segments_time(detour);
    if (vacation < -1e-9 * head.cycleTime)
      throw InputError(fmt::format("sim: cluster detour in sub-period {} exceeds the vacation", j + 1));
    const auto cycle = head_cycle(head, std::max(0.0, vacation), [&](std::size_t s) {
      return s == at ? detour : std::vector<Segment>{};
    });
    period.insert(period.end(), cycle.begin(), cycle.end());
  }
  const double tail = joint.period - static_cast<double>(full) * head.cycleTime;
  if (tail > 0.0) period.push_back(rest(p.station, tail, vac));

  std::vector<Tracked> nodes = routed_nodes(scenario, head);
  for (const Cluster& c : clustering.clusters) {
    const Point hp = scenario.node(c.headId).pos;
    for (int t : c.memberIds) {
      const SensorNode& n = scenario.node(t);
      nodes.push_back({t, n.pos, false, 0.0, node_consumption(n.rate, distance(n.pos, hp), p)});
    }
  }
  std::sort(nodes.begin(), nodes.end(), [](const Tracked& a, const Tracked& b) { return a.id < b.id; });
  return Engine(scenario, std::move(nodes), &head.flows, options).run(period);
}

Trace simulate_head_layer(const Scenario& scenario, const HeadLayerPlan& head,
                          const SimOptions& options) {
  check_head_plan(head);
  const auto cycle = head_cycle(head, head.vacation, [](std::size_t) { return std::vector<Segment>{}; });
  return Engine(scenario, routed_nodes(scenario, head), &head.flows, options).run(cycle);
}

Trace simulate_cluster(const Scenario& scenario, const ClusterPlan& plan,
                       const SimOptions& options) {
  if (plan.stopDurations.size() != plan.cells.cells.size() ||
      plan.tour.waypoints.size() != plan.cells.cells.size() + 1)
    throw InputError("sim: cluster plan stops and tour disagree");
  const NetworkParams& p = scenario.params();
  const Point hp = scenario.node(plan.headId).pos;
  std::vector<Tracked> nodes;
  for (const Cell& cell : plan.cells.cells)
    for (int t : cell.memberIds) {
      const SensorNode& n = scenario.node(t);
      nodes.push_back({t, n.pos, false, 0.0, node_consumption(n.rate, distance(n.pos, hp), p)});
    }
  std::sort(nodes.begin(), nodes.end(), [](const Tracked& a, const Tracked& b) { return a.id < b.id; });
  std::vector<Segment> period{rest(hp, plan.vacation, -1)};
  const auto tour = cluster_tour(plan, plan.stopDurations, p.speed, -1);
  period.insert(period.end(), tour.begin(), tour.end());
  return Engine(scenario, std::move(nodes), nullptr, options).run(period);
}

RenewVerdict check_renewable(const Trace& trace, double marginFrac) {
  RenewVerdict v;
  v.marginFrac = marginFrac;
  v.threshold = trace.eMin - marginFrac * trace.eMax;
  v.minEnergy = std::numeric_limits<double>::infinity();
  const double floor = v.threshold - kSimSlack * trace.eMax;
  for (std::size_t n = 0; n < trace.nodeIds.size(); ++n) {
    bool reported = false;
    for (std::size_t per = 0; per < trace.stats.size(); ++per) {
      const NodePeriodStats& s = trace.stats[per][n];
      if (s.min < v.minEnergy) {
        v.minEnergy = s.min;
        v.minNode = trace.nodeIds[n];
        v.minTime = s.minTime;
      }
      if (!reported && s.min < floor) {
        v.failures.push_back({RenewFailure::Kind::BelowMin, trace.nodeIds[n], per + 1, s.minTime, s.min});
        reported = true;
      }
    }
    // Steady state is judged from the second period on.
    for (std::size_t per = 2; per < trace.stats.size(); ++per) {
      const double prev = trace.stats[per - 1][n].end, cur = trace.stats[per][n].end;
      if (cur < prev - kDeclineTol * trace.eMax) {
        v.failures.push_back({RenewFailure::Kind::Declining, trace.nodeIds[n], per + 1,
                              trace.period * static_cast<double>(per + 1), cur - prev});
        break;
      }
    }
  }
  if (trace.nodeIds.empty()) v.minEnergy = trace.eMax;
  v.pass = v.failures.empty();
  return v;
}

std::string describe(const RenewVerdict& v) {
  if (v.pass)
    return fmt::format("pass: lowest battery {:.6g} J (node {}, t = {:.6g}), threshold {:.6g} J",
                       v.minEnergy, v.minNode, v.minTime, v.threshold);
  std::ostringstream os;
  os << fmt::format("fail: {} violation(s)", v.failures.size());
  constexpr std::size_t kListed = 5;
  for (std::size_t k = 0; k < std::min(kListed, v.failures.size()); ++k) {
    const RenewFailure& f = v.failures[k];
    if (f.kind == RenewFailure::Kind::BelowMin)
      os << fmt::format("; node {} at {:.6g} J below {:.6g} J at t = {:.6g} (period {})", f.nodeId,
                        f.value, v.threshold, f.time, f.period);
    else
      os << fmt::format("; node {} period-end energy fell by {:.6g} J in period {}", f.nodeId,
                        -f.value, f.period);
  }
  if (v.failures.size() > kListed) os << fmt::format("; {} more", v.failures.size() - kListed);
  return os.str();
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  out << "time,node_id,energy\n";
  for (std::size_t k = 0; k < trace.times.size(); ++k)
    for (std::size_t n = 0; n < trace.nodeIds.size(); ++n)
      out << fmt::format("{:.9g},{},{:.12g}\n", trace.times[k], trace.nodeIds[n], trace.energy[k][n]);
}

}  // namespace tlfw
