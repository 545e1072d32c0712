#include "tlfw/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <set>
#include <tuple>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "tlfw/error.hpp"

namespace tlfw {

namespace {

constexpr double kBindingTol = 1e-7;
constexpr double kZeroDuration = 1e-15;

double sum_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Sparse model assembled column by column, converted to the dense solver format on demand.
struct SparseLp {
  struct Entry {
    std::size_t row;
    double value;
  };
  std::vector<double> cost;
  std::vector<std::vector<Entry>> cols;
  std::vector<std::string> colNames;
  std::vector<lp::Relation> rel;
  std::vector<double> rhs;
  std::vector<std::string> rowNames;

  std::size_t add_row(lp::Relation r, double b, std::string name) {
    rel.push_back(r);
    rhs.push_back(b);
    rowNames.push_back(std::move(name));
    return rel.size() - 1;
  }
  std::size_t add_col(double c, std::vector<Entry> entries, std::string name) {
    cost.push_back(c);
    cols.push_back(std::move(entries));
    colNames.push_back(std::move(name));
    return cost.size() - 1;
  }

  lp::Problem dense() const {
    lp::Problem p;
    p.objective = cost;
    p.varNames = colNames;
    p.rows.resize(rel.size());
    for (std::size_t i = 0; i < rel.size(); ++i) {
      p.rows[i].coeffs.assign(cost.size(), 0.0);
      p.rows[i].rel = rel[i];
      p.rows[i].rhs = rhs[i];
      p.rows[i].name = rowNames[i];
    }
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (const Entry& e : cols[j]) p.rows[e.row].coeffs[j] += e.value;
    return p;
  }
};

double row_activity(const lp::Problem& p, std::size_t row, const std::vector<double>& x) {
  double a = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) a += p.rows[row].coeffs[j] * x[j];
  return a;
}

void fill_residuals(SolveDiagnostics& diag, const lp::Problem& p, const lp::Solution& s) {
  const lp::Residuals r = lp::verify(p, s);
  diag.maxViolation = r.maxViolation;
  diag.maxNegativity = r.maxNegativity;
  diag.rows = p.rows.size();
  diag.columns = p.num_vars();
}

}  // namespace

std::string_view to_string(EpochKind kind) {
  switch (kind) {
    case EpochKind::Stop: return "stop";
    case EpochKind::Vacation: return "vacation";
    case EpochKind::Move: return "move";
  }
  return "?";
}

std::string_view to_string(ChargeModel model) {
  return model == ChargeModel::Colocation ? "colocation" : "ranged";
}

std::string_view to_string(HeadMode mode) {
  return mode == HeadMode::TlfwHeads ? "tlfw-heads" : "msirsn-baseline";
}

std::vector<Epoch> build_epochs(const Tour& tour, Point station, double segMax, double speed) {
  if (!(segMax > 0.0)) throw InputError("segment length must be > 0");
  if (!(speed > 0.0)) throw InputError("vehicle speed must be > 0");
  std::vector<Epoch> out;
  out.push_back(Epoch{EpochKind::Vacation, 0, station, 0.0, 0.0});
  const std::size_t n = tour.waypoints.size();
  if (n < 2) return out;
  for (std::size_t k = 0; k < n; ++k) {
    const Point a = tour.waypoints[k];
    const Point b = tour.waypoints[(k + 1) % n];
    const double len = distance(a, b);
    const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(len / segMax - 1e-12)));
    if (len > 0.0) {
      for (std::size_t s = 0; s < pieces; ++s) {
        const double mid = (static_cast<double>(s) + 0.5) / static_cast<double>(pieces);
        const double piece = len / static_cast<double>(pieces);
        out.push_back(Epoch{EpochKind::Move, k, lerp(a, b, mid), piece / speed, piece});
      }
    }
    const std::size_t next = (k + 1) % n;
    if (next != 0)
      out.push_back(Epoch{EpochKind::Stop, tour.order[next] - 1, b, 0.0, 0.0});
  }
  return out;
}

double ClusterPlan::charge_time() const { return sum_of(stopDurations); }
double HeadLayerPlan::charge_time() const { return sum_of(stopDurations); }

ClusterPlan solve_cluster_plan(const Scenario& scenario, const Cluster& cluster,
                               const CellPlan& cells, std::uint64_t seed,
                               const lp::Options& lpOptions) {
  const NetworkParams& p = scenario.params();
  const SensorNode& head = scenario.node(cluster.headId);
  const std::vector<Point> centers = cells.centers();
  const std::size_t nq = centers.size();

  ClusterPlan plan;
  plan.headId = cluster.headId;
  plan.cells = cells;

  std::vector<Point> tourPts{head.pos};
  tourPts.insert(tourPts.end(), centers.begin(), centers.end());
  plan.tour = shortest_tour(tourPts, seed);
  plan.travelTime = plan.tour.length / p.speed;

  struct NodeRow {
    int id;
    double consumption;
    std::vector<std::pair<std::size_t, double>> reach;
  };
  std::vector<NodeRow> nodes;
  for (int t : cluster.memberIds) {
    const SensorNode& n = scenario.node(t);
    NodeRow row{t, node_consumption(n.rate, distance(n.pos, head.pos), p), {}};
    for (std::size_t q : reachable_stops(n.pos, centers, p.dDelta)) {
      const double u = charge_rate(distance(n.pos, centers[q]), p);
      if (u > 0.0) row.reach.emplace_back(q, u);
    }
    if (row.reach.empty()) throw UnchargeableNodeError(fmt::format("unchargeable node {}", t), {t});
    if (row.consumption > 0.0) nodes.push_back(std::move(row));
  }
  if (nodes.empty())
    throw DegenerateError(
        fmt::format("degenerate: zero consumption in the cluster of head {}", cluster.headId));
  plan.logicalRate = cluster_logical_rate(scenario, cluster, cells);

  const double dE = p.eMax - p.eMin;
  auto build = [&](bool elastic) {
    lp::Problem lpp;
    for (std::size_t q = 0; q < nq; ++q) lpp.add_var(0.0, fmt::format("w[{}]", q));
    const std::size_t eta = lpp.add_var(elastic ? 0.0 : 1.0, "eta");
    const std::size_t theta = lpp.add_var(0.0, "theta");
    lp::Row& time = lpp.add_row(lp::Relation::Equal, 1.0, "time");
    for (std::size_t q = 0; q < nq; ++q) time.coeffs[q] = 1.0;
    time.coeffs[eta] = 1.0;
    time.coeffs[theta] = plan.tour.length / p.speed;
    for (const NodeRow& n : nodes) {
      lp::Row& bal = lpp.add_row(lp::Relation::GreaterEqual, n.consumption,
                                 fmt::format("balance[{}]", n.id));
      for (auto [q, u] : n.reach) bal.coeffs[q] = u;
      lp::Row& dip = lpp.add_row(lp::Relation::GreaterEqual, n.consumption,
                                 fmt::format("dip[{}]", n.id));
      for (auto [q, u] : n.reach) dip.coeffs[q] = n.consumption;
      dip.coeffs[theta] = dE;
    }
    if (elastic) {
      for (std::size_t i = 1; i < lpp.rows.size(); ++i) {
        const std::size_t s = lpp.add_var(-1.0, fmt::format("slack[{}]", i));
        for (auto& r : lpp.rows) r.coeffs.resize(lpp.num_vars(), 0.0);
        lpp.rows[i].coeffs[s] = 1.0;
      }
    }
    return lpp;
  };

  const lp::Problem lpp = build(false);
  const lp::Solution sol = lp::solve(lpp, lpOptions);
  if (sol.status == lp::Status::Infeasible) {
    const lp::Problem el = build(true);
    const lp::Solution es = lp::solve(el, lpOptions);
    std::vector<int> bad;
    for (std::size_t k = 0; k < nodes.size() && es.status == lp::Status::Optimal; ++k) {
      const std::size_t base = nq + 2;
      if (es.values[base + 2 * k] > lpOptions.feasTol || es.values[base + 2 * k + 1] > lpOptions.feasTol)
        bad.push_back(nodes[k].id);
    }
    throw InfeasibleError(
        fmt::format("cluster of head {}: no schedule keeps every node above Emin (nodes {})",
                    cluster.headId, fmt::join(bad, ", ")),
        bad);
  }
  if (sol.status != lp::Status::Optimal)
    throw Error(fmt::format("cluster of head {}: solver returned {}", cluster.headId,
                            lp::to_string(sol.status)));

  const double theta = sol.values[nq + 1];
  if (!(theta > 0.0))
    throw DegenerateError(fmt::format("degenerate: cycle of head {} unbounded", cluster.headId));
  const double tau = 1.0 / theta;
  plan.cycleTime = tau;
  plan.maxCycle = tau;
  plan.objective = sol.values[nq];
  plan.vacation = plan.objective * tau;
  plan.stopDurations.resize(nq);
  for (std::size_t q = 0; q < nq; ++q) plan.stopDurations[q] = sol.values[q] * tau;
  plan.chargeFraction = std::accumulate(sol.values.begin(), sol.values.begin() + static_cast<std::ptrdiff_t>(nq), 0.0);

  plan.diag.iterations = sol.iterations;
  fill_residuals(plan.diag, lpp, sol);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const std::size_t row = 2 + 2 * k;
    const double slack = row_activity(lpp, row, sol.values) - lpp.rows[row].rhs;
    if (std::abs(slack) <= kBindingTol * std::max(1.0, lpp.rows[row].rhs))
      plan.diag.bindingNodes.push_back(nodes[k].id);
  }
  return plan;
}

std::vector<Participant> head_participants(const Scenario& scenario, const Clustering& clustering) {
  std::vector<Participant> out;
  for (const Cluster& c : clustering.clusters)
    out.push_back({c.headId, cluster_ingress_rate(c, scenario), member_rate(c, scenario)});
  return out;
}

std::vector<Participant> baseline_participants(const Scenario& scenario) {
  std::vector<Participant> out;
  for (const SensorNode& n : scenario.nodes()) out.push_back({n.id, n.rate, 0.0});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

std::vector<Point> baseline_stops(const Scenario& scenario, double side) {
  std::vector<int> ids;
  for (const SensorNode& n : scenario.nodes()) ids.push_back(n.id);
  return occupied_cells(scenario, ids, side).centers();
}

namespace {

// Head-layer LP with relay columns F(i -> j, e) priced in on demand. Volumes sent
// straight to the vehicle are eliminated through flow conservation, which leaves a
// nonnegativity row per (node, epoch) that is only materialised once the node relays
// in that epoch.
class HeadLayerSolver {
 public:
  HeadLayerSolver(const Scenario& scenario, std::span<const Participant> parts,
                  std::span<const Point> stops, const Tour& tour, std::vector<Epoch> epochs,
                  const HeadPlanOptions& opt)
      : sc_(scenario), p_(scenario.params()), parts_(parts.begin(), parts.end()),
        nStops_(stops.size()), epochs_(std::move(epochs)), opt_(opt) {
    const std::size_t P = parts_.size();
    travel_ = tour.length / p_.speed;
    pos_.resize(P);
    base_.resize(P);
    for (std::size_t a = 0; a < P; ++a) {
      pos_[a] = sc_.node(parts_[a].id).pos;
      base_[a] = p_.alpha * sc_.node(parts_[a].id).rate + p_.rho * parts_[a].memberRate;
    }
    const std::size_t E = epochs_.size();
    cB_.assign(P, std::vector<double>(E));
    charge_.assign(P, std::vector<double>(E, 0.0));
    for (std::size_t a = 0; a < P; ++a)
      for (std::size_t e = 0; e < E; ++e) {
        const double d = distance(pos_[a], epochs_[e].position);
        cB_[a][e] = link_cost(d, p_);
        if (epochs_[e].kind != EpochKind::Stop) continue;
        charge_[a][e] = opt_.chargeModel == ChargeModel::Colocation
                            ? head_charge_rate(pos_[a], epochs_[e].position, p_)
                            : charge_rate(d, p_);
      }

    // Relay arcs, optionally pruned to each node's nearest participants.
    for (std::size_t a = 0; a < P; ++a) {
      std::vector<std::size_t> others;
      for (std::size_t j = 0; j < P; ++j)
        if (j != a) others.push_back(j);
      std::stable_sort(others.begin(), others.end(), [&](std::size_t x, std::size_t y) {
        return distance(pos_[a], pos_[x]) < distance(pos_[a], pos_[y]);
      });
      if (opt_.pruneK > 0 && opt_.pruneK < others.size()) others.resize(opt_.pruneK);
      std::sort(others.begin(), others.end());
      for (std::size_t j : others) arcs_.push_back({a, j, link_cost(distance(pos_[a], pos_[j]), p_)});
    }
  }

  std::size_t candidate_count() const { return arcs_.size() * epochs_.size(); }

  HeadLayerPlan solve(HeadLayerPlan plan) {
    const std::size_t E = epochs_.size();
    const bool full = !opt_.forceColumnGeneration && candidate_count() <= opt_.fullColumnLimit;
    inModel_.assign(candidate_count(), false);
    if (full)
      for (std::size_t c = 0; c < candidate_count(); ++c) add_column(c);

    bool elastic = false, elasticDone = false, rebuild = true;
    std::unique_ptr<lp::IncrementalSolver> lps;
    lp::Solution sol;
    std::size_t iterations = 0, rounds = 0;
    while (true) {
      ++rounds;
      if (rebuild) {
        lps = std::make_unique<lp::IncrementalSolver>(assemble(elastic).dense(), opt_.lp);
        rebuild = false;
      }
      sol = lps->solve();
      iterations += sol.iterations;
      if (sol.status == lp::Status::Infeasible && !elastic) {
        if (elasticDone) throw Error("head layer: solver lost feasibility after repair");
        elastic = elasticDone = rebuild = true;
        continue;
      }
      if (sol.status != lp::Status::Optimal)
        throw Error(fmt::format("head layer: solver returned {}", lp::to_string(sol.status)));

      if (elastic && elastic_total(sol) <= opt_.lp.feasTol) {
        elastic = false;
        rebuild = true;
        continue;
      }
      const std::size_t added = price(sol, *lps);
      spdlog::debug("head layer round {}: {} rows, {} columns, objective {}, added {}", rounds,
                    lps->problem().rows.size(), lps->problem().num_vars(), sol.objectiveValue,
                    added);
      if (added > 0) continue;
      if (elastic) {
        std::vector<int> bad;
        for (std::size_t a = 0; a < parts_.size(); ++a)
          if (sol.values[elasticBase_ + 2 * a] > opt_.lp.feasTol ||
              sol.values[elasticBase_ + 2 * a + 1] > opt_.lp.feasTol)
            bad.push_back(parts_[a].id);
        throw InfeasibleError(
            fmt::format("{}: no schedule keeps every node above Emin (nodes {})",
                        to_string(opt_.mode), fmt::join(bad, ", ")),
            bad);
      }
      break;
    }
    const lp::Problem& problem = lps->problem();
    if (opt_.lpDump) lp::write_text(problem, *opt_.lpDump);

    const double theta = sol.values[nStops_ + 1];
    if (!(theta > 0.0)) throw DegenerateError("degenerate: head-layer cycle unbounded");
    const double tau = 1.0 / theta;
    plan.cycleTime = tau;
    plan.objective = sol.values[nStops_];
    plan.vacation = plan.objective * tau;
    plan.travelTime = travel_;
    plan.stopDurations.resize(nStops_);
    for (std::size_t s = 0; s < nStops_; ++s) plan.stopDurations[s] = sol.values[s] * tau;
    plan.epochs = epochs_;
    plan.epochDurations.resize(E);
    plan.flows.resize(E);

    std::vector<std::vector<double>> out(E, std::vector<double>(parts_.size(), 0.0));
    std::vector<std::vector<double>> in(E, std::vector<double>(parts_.size(), 0.0));
    std::vector<double> dhat(E);
    for (std::size_t e = 0; e < E; ++e) {
      dhat[e] = epoch_share(e, sol.values);
      plan.epochDurations[e] = dhat[e] * tau;
    }
    for (std::size_t k = 0; k < columns_.size(); ++k) {
      const auto [arc, e] = split(columns_[k]);
      const double vol = sol.values[relayBase_ + k];
      if (dhat[e] <= kZeroDuration || vol <= 0.0) continue;
      const double f = vol / dhat[e];
      plan.flows[e].relays.push_back(
          {parts_[arcs_[arc].from].id, parts_[arcs_[arc].to].id, f});
      out[e][arcs_[arc].from] += f;
      in[e][arcs_[arc].to] += f;
    }
    for (std::size_t e = 0; e < E; ++e) {
      std::sort(plan.flows[e].relays.begin(), plan.flows[e].relays.end(),
                [](const Relay& x, const Relay& y) { return std::tie(x.from, x.to) < std::tie(y.from, y.to); });
      for (std::size_t a = 0; a < parts_.size(); ++a)
        plan.flows[e].toStation[parts_[a].id] =
            std::max(0.0, parts_[a].ingress + in[e][a] - out[e][a]);
    }

    plan.diag.iterations = iterations;
    plan.diag.rounds = rounds;
    plan.diag.candidateColumns = candidate_count();
    fill_residuals(plan.diag, problem, sol);
    for (std::size_t a = 0; a < parts_.size(); ++a) {
      const std::size_t row = 1 + parts_.size() + a;
      const double act = row_activity(problem, row, sol.values);
      if (std::abs(act) <= kBindingTol * std::max(1.0, (p_.eMax - p_.eMin) * theta))
        plan.diag.bindingNodes.push_back(parts_[a].id);
    }
    return plan;
  }

 private:
  struct Arc {
    std::size_t from, to;
    double cost;
  };

  std::pair<std::size_t, std::size_t> split(std::size_t cand) const {
    return {cand / epochs_.size(), cand % epochs_.size()};
  }

  // Coefficients of epoch e's normalised duration on (w..., eta, theta).
  std::vector<std::pair<std::size_t, double>> duration_terms(std::size_t e) const {
    const Epoch& ep = epochs_[e];
    switch (ep.kind) {
      case EpochKind::Stop: return {{ep.index, 1.0}};
      case EpochKind::Vacation: return {{nStops_, 1.0}};
      case EpochKind::Move: return {{nStops_ + 1, ep.fixedDuration}};
    }
    return {};
  }

  double epoch_share(std::size_t e, const std::vector<double>& x) const {
    double d = 0.0;
    for (auto [v, c] : duration_terms(e)) d += c * x[v];
    return d;
  }

  void add_column(std::size_t cand) {
    if (inModel_[cand]) return;
    inModel_[cand] = true;
    columns_.push_back(cand);
    const auto [arc, e] = split(cand);
    const auto key = std::make_pair(arcs_[arc].from, e);
    if (!flowRow_.count(key)) {
      flowRow_[key] = flowOrder_.size();
      flowOrder_.push_back(key);
    }
  }

  SparseLp assemble(bool elastic) {
    const std::size_t P = parts_.size();
    const std::size_t E = epochs_.size();
    SparseLp m;
    m.add_row(lp::Relation::Equal, 1.0, "time");
    for (std::size_t a = 0; a < P; ++a)
      m.add_row(lp::Relation::LessEqual, 0.0, fmt::format("balance[{}]", parts_[a].id));
    for (std::size_t a = 0; a < P; ++a)
      m.add_row(lp::Relation::LessEqual, 0.0, fmt::format("dip[{}]", parts_[a].id));
    flowBase_ = 1 + 2 * P;
    for (auto [a, e] : flowOrder_)
      m.add_row(lp::Relation::LessEqual, 0.0, fmt::format("flow[{},{}]", parts_[a].id, e));

    // Duration variables.
    std::vector<std::vector<SparseLp::Entry>> dur(nStops_ + 2);
    for (std::size_t s = 0; s < nStops_; ++s) dur[s].push_back({0, 1.0});
    dur[nStops_].push_back({0, 1.0});
    dur[nStops_ + 1].push_back({0, travel_});
    dur[nStops_ + 1].reserve(2 * P + 1);
    std::vector<std::vector<double>> bal(nStops_ + 2, std::vector<double>(P, 0.0));
    std::vector<std::vector<double>> dip = bal;
    for (std::size_t e = 0; e < E; ++e) {
      for (auto [v, c] : duration_terms(e)) {
        for (std::size_t a = 0; a < P; ++a) {
          const double use = (base_[a] + cB_[a][e] * parts_[a].ingress) * c;
          bal[v][a] += use - charge_[a][e] * c;
          if (charge_[a][e] <= 0.0) dip[v][a] += use;
        }
      }
    }
    const double dE = p_.eMax - p_.eMin;
    for (std::size_t a = 0; a < P; ++a) dip[nStops_ + 1][a] -= dE;
    for (std::size_t v = 0; v < nStops_ + 2; ++v)
      for (std::size_t a = 0; a < P; ++a) {
        if (bal[v][a] != 0.0) dur[v].push_back({1 + a, bal[v][a]});
        if (dip[v][a] != 0.0) dur[v].push_back({1 + P + a, dip[v][a]});
      }
    for (std::size_t k = 0; k < flowOrder_.size(); ++k) {
      const auto [a, e] = flowOrder_[k];
      for (auto [v, c] : duration_terms(e)) dur[v].push_back({flowBase_ + k, -parts_[a].ingress * c});
    }
    for (std::size_t s = 0; s < nStops_; ++s)
      m.add_col(0.0, std::move(dur[s]), fmt::format("w[{}]", s));
    m.add_col(elastic ? 0.0 : 1.0, std::move(dur[nStops_]), "eta");
    m.add_col(0.0, std::move(dur[nStops_ + 1]), "theta");

    elasticBase_ = m.cost.size();
    if (elastic) {
      for (std::size_t a = 0; a < P; ++a) {
        m.add_col(-1.0, {{1 + a, -1.0}}, fmt::format("sb[{}]", parts_[a].id));
        m.add_col(-1.0, {{1 + P + a, -1.0}}, fmt::format("sd[{}]", parts_[a].id));
      }
    }
    relayBase_ = m.cost.size();
    for (std::size_t cand : columns_) {
      const auto [arc, e] = split(cand);
      m.add_col(0.0, relay_entries(arc, e),
                fmt::format("F[{}>{},{}]", parts_[arcs_[arc].from].id, parts_[arcs_[arc].to].id, e));
    }
    return m;
  }

  std::vector<SparseLp::Entry> relay_entries(std::size_t arc, std::size_t e) const {
    const std::size_t P = parts_.size();
    const Arc& r = arcs_[arc];
    const double outCost = r.cost - cB_[r.from][e];
    const double inCost = p_.rho + cB_[r.to][e];
    std::vector<SparseLp::Entry> v{{1 + r.from, outCost}, {1 + r.to, inCost}};
    if (charge_[r.from][e] <= 0.0) v.push_back({1 + P + r.from, outCost});
    if (charge_[r.to][e] <= 0.0) v.push_back({1 + P + r.to, inCost});
    if (auto it = flowRow_.find({r.from, e}); it != flowRow_.end())
      v.push_back({flowBase_ + it->second, 1.0});
    if (auto it = flowRow_.find({r.to, e}); it != flowRow_.end())
      v.push_back({flowBase_ + it->second, -1.0});
    return v;
  }

  double elastic_total(const lp::Solution& s) const {
    double t = 0.0;
    for (std::size_t k = 0; k < 2 * parts_.size(); ++k) t += s.values[elasticBase_ + k];
    return t;
  }

  // Adds the most attractive absent relay columns, with any flow rows they need, to
  // the live model. Returns how many columns were added.
  std::size_t price(const lp::Solution& sol, lp::IncrementalSolver& lps) {
    std::vector<std::pair<double, std::size_t>> attractive;
    for (std::size_t cand = 0; cand < candidate_count(); ++cand) {
      if (inModel_[cand]) continue;
      const auto [arc, e] = split(cand);
      double rc = 0.0;
      for (const auto& ent : relay_entries(arc, e)) rc -= sol.duals[ent.row] * ent.value;
      if (rc > opt_.lp.costTol) attractive.emplace_back(rc, cand);
    }
    std::sort(attractive.begin(), attractive.end(), [](const auto& x, const auto& y) {
      return x.first != y.first ? x.first > y.first : x.second < y.second;
    });
    const std::size_t n = std::min(attractive.size(), std::max<std::size_t>(opt_.columnBatch, 1));

    const std::size_t oldRows = flowOrder_.size();
    std::vector<std::size_t> fresh;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t cand = attractive[k].second;
      const auto [arc, e] = split(cand);
      std::vector<lp::IncrementalSolver::Entry> entries;
      for (const auto& ent : relay_entries(arc, e)) entries.push_back({ent.row, ent.value});
      lps.add_column(0.0, entries,
                     fmt::format("F[{}>{},{}]", parts_[arcs_[arc].from].id,
                                 parts_[arcs_[arc].to].id, e));
      fresh.push_back(cand);
    }
    for (std::size_t cand : fresh) add_column(cand);

    // Rows for nodes that start relaying in an epoch, over every column present.
    for (std::size_t k = oldRows; k < flowOrder_.size(); ++k) {
      const auto [a, e] = flowOrder_[k];
      std::vector<lp::IncrementalSolver::Entry> row;
      for (auto [v, c] : duration_terms(e)) row.push_back({v, -parts_[a].ingress * c});
      for (std::size_t idx = 0; idx < columns_.size(); ++idx) {
        const auto [arc, ce] = split(columns_[idx]);
        if (ce != e) continue;
        if (arcs_[arc].from == a) row.push_back({relayBase_ + idx, 1.0});
        if (arcs_[arc].to == a) row.push_back({relayBase_ + idx, -1.0});
      }
      lps.add_row(lp::Relation::LessEqual, 0.0, row,
                  fmt::format("flow[{},{}]", parts_[a].id, e));
    }
    return n;
  }

  const Scenario& sc_;
  const NetworkParams& p_;
  std::vector<Participant> parts_;
  std::size_t nStops_;
  std::vector<Epoch> epochs_;
  HeadPlanOptions opt_;
  double travel_ = 0.0;
  std::vector<Point> pos_;
  std::vector<double> base_;
  std::vector<std::vector<double>> cB_;
  std::vector<std::vector<double>> charge_;
  std::vector<Arc> arcs_;
  std::vector<bool> inModel_;
  std::vector<std::size_t> columns_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> flowRow_;
  std::vector<std::pair<std::size_t, std::size_t>> flowOrder_;
  std::size_t flowBase_ = 0;
  std::size_t elasticBase_ = 0;
  std::size_t relayBase_ = 0;
};

}  // namespace

HeadLayerPlan solve_head_plan(const Scenario& scenario, std::span<const Point> stops,
                              std::span<const Participant> participants,
                              const HeadPlanOptions& options) {
  if (participants.empty()) throw InputError("head layer: no participants");
  std::set<int> ids;
  double load = 0.0;
  for (const Participant& a : participants) {
    if (!scenario.contains(a.id) || !ids.insert(a.id).second)
      throw InputError(fmt::format("head layer: bad or repeated participant {}", a.id));
    if (!(a.ingress >= 0.0) || !(a.memberRate >= 0.0))
      throw InputError(fmt::format("head layer: negative rate for participant {}", a.id));
    load += a.ingress + a.memberRate + scenario.params().alpha * scenario.node(a.id).rate;
  }
  if (!(load > 0.0)) throw DegenerateError("degenerate: zero consumption in the head layer");

  const NetworkParams& p = scenario.params();
  HeadLayerPlan plan;
  plan.mode = options.mode;
  plan.chargeModel = options.chargeModel;
  plan.participants.assign(participants.begin(), participants.end());
  plan.stops.assign(stops.begin(), stops.end());
  plan.pruneK = options.pruneK;
  plan.segMax = options.segMax;

  std::vector<Point> pts{p.station};
  pts.insert(pts.end(), stops.begin(), stops.end());
  plan.tour = shortest_tour(pts, options.seed);
  std::vector<Epoch> epochs = build_epochs(plan.tour, p.station, options.segMax, p.speed);

  HeadLayerSolver solver(scenario, participants, stops, plan.tour, std::move(epochs), options);
  return solver.solve(std::move(plan));
}

HeadLayerPlan solve_tlfw_head_plan(const Scenario& scenario, const Clustering& clustering,
                                   HeadPlanOptions options) {
  options.mode = HeadMode::TlfwHeads;
  options.chargeModel = ChargeModel::Colocation;
  std::vector<Point> stops;
  for (const Cluster& c : clustering.clusters) stops.push_back(scenario.node(c.headId).pos);
  const auto parts = head_participants(scenario, clustering);
  return solve_head_plan(scenario, stops, parts, options);
}

HeadLayerPlan solve_baseline_plan(const Scenario& scenario, HeadPlanOptions options) {
  options.mode = HeadMode::MsirsnBaseline;
  options.chargeModel = ChargeModel::Ranged;
  const auto stops = baseline_stops(scenario, scenario.params().dDelta);
  const auto parts = baseline_participants(scenario);
  return solve_head_plan(scenario, stops, parts, options);
}

ClusterSummary summarize(const ClusterPlan& plan) {
  return ClusterSummary{plan.cycleTime, plan.charge_time(), plan.travelTime, plan.maxCycle,
                        plan.stopDurations, plan.headId};
}

HeadSummary summarize(const HeadLayerPlan& plan) {
  return HeadSummary{plan.cycleTime, plan.vacation, plan.charge_time(), plan.travelTime};
}

JointPlan solve_joint(std::span<const ClusterSummary> clusters, const HeadSummary& head,
                      std::size_t m) {
  if (clusters.size() != m)
    throw InputError(fmt::format("joint: {} cluster plans for m = {}", clusters.size(), m));
  if (m == 0) throw InputError("joint: need at least one cluster");
  if (!(head.cycleTime > 0.0) || !std::isfinite(head.cycleTime))
    throw InputError("joint: head cycle must be finite and > 0");

  const double inf = std::numeric_limits<double>::infinity();
  JointPlan out;
  out.cycleBound = inf;
  out.budgetBound = inf;
  for (const ClusterSummary& c : clusters) {
    if (c.travelTime >= head.vacation)
      throw InfeasibleError(
          fmt::format("joint: cluster of head {} needs {:.6g} travel but the vacation is {:.6g}",
                      c.headId, c.travelTime, head.vacation),
          {c.headId});
    out.cycleBound = std::min(out.cycleBound, c.maxCycle);
    const double rate = std::isfinite(c.cycleTime) ? c.chargeTime / c.cycleTime : 0.0;
    if (rate > 0.0) out.budgetBound = std::min(out.budgetBound, (head.vacation - c.travelTime) / rate);
  }
  double T = std::min(out.cycleBound, out.budgetBound);
  // Nothing bounds the period when no cluster consumes energy: use the shortest admissible one.
  if (!std::isfinite(T)) T = static_cast<double>(m) * head.cycleTime;

  out.period = T;
  out.subPeriods = T / head.cycleTime;
  if (out.subPeriods < static_cast<double>(m)) {
    std::vector<int> heads;
    for (const ClusterSummary& c : clusters) heads.push_back(c.headId);
    throw InfeasibleError(
        fmt::format("joint: period {:.6g} holds {:.6g} head cycles, fewer than the {} clusters",
                    T, out.subPeriods, m),
        heads);
  }

  for (std::size_t i = 0; i < m; ++i) {
    const ClusterSummary& c = clusters[i];
    out.subPeriodAssignment.push_back(i);
    const double scale = std::isfinite(c.cycleTime) ? T / c.cycleTime : 0.0;
    out.scaledChargeTimes.push_back(c.chargeTime * scale);
    std::vector<double> s;
    for (double w : c.stopDurations) s.push_back(w * scale);
    out.scaledStopDurations.push_back(std::move(s));
    out.breakdown.normalChargeTime += c.chargeTime * scale;
    out.breakdown.normalTravelTime += c.travelTime;
  }
  out.breakdown.headChargeTime = out.subPeriods * head.chargeTime;
  out.breakdown.headTravelTime = out.subPeriods * head.travelTime;
  out.vacation = out.subPeriods * head.vacation -
                 (out.breakdown.normalChargeTime + out.breakdown.normalTravelTime);
  out.objective = out.vacation / T;
  return out;
}

}  // namespace tlfw
