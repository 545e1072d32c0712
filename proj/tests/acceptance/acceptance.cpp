// One line per acceptance criterion. Tolerances are fixed here and never relaxed to
// make a criterion pass; the exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "tlfw/error.hpp"
#include "tlfw/report.hpp"

using namespace tlfw;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void need(bool ok, std::string note) {
    pass = pass && ok;
    notes.push_back((ok ? "" : "FAILED ") + std::move(note));
  }
  void info(std::string note) { notes.push_back(std::move(note)); }
};

int failures = 0;

void report(int id, const char* name, const Verdict& v) {
  std::string line = fmt::format("{} {} {}:", v.pass ? "PASS" : "FAIL", id, name);
  for (std::size_t k = 0; k < v.notes.size(); ++k) line += (k ? "; " : " ") + v.notes[k];
  std::puts(line.c_str());
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }
bool within_rel(double v, double target, double frac) {
  return std::abs(v - target) <= frac * std::abs(target);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

RunSettings baseline_settings() {
  RunSettings s;
  s.mode = HeadMode::MsirsnBaseline;
  s.pruneK = 6;
  s.seed = 42;
  return s;
}

RunSettings tlfw_settings(std::size_t m = 4, std::size_t restarts = 16) {
  RunSettings s;
  s.clusters = m;
  s.restarts = restarts;
  s.seed = 42;
  return s;
}

struct TlfwRun {
  RunResult result;
  std::string infeasible;
  double seconds = 0.0;
};

TlfwRun run_tlfw(const Scenario& sc, const RunSettings& s) {
  TlfwRun r{RunResult{sc, s}, {}, 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    run_pipeline(sc, s, &r.result);
  } catch (const InfeasibleError& e) {
    r.infeasible = e.what();
  }
  r.seconds = seconds_since(t0);
  return r;
}

// Worst relative conservation residual over all epochs with positive duration.
double flow_residual(const HeadLayerPlan& plan) {
  double worst = 0.0;
  for (std::size_t e = 0; e < plan.epochs.size(); ++e) {
    if (plan.epochDurations[e] <= 0.0) continue;
    for (const Participant& a : plan.participants) {
      double in = 0, out = 0;
      for (const Relay& r : plan.flows[e].relays) {
        if (r.to == a.id) in += r.rate;
        if (r.from == a.id) out += r.rate;
        if (r.rate < 0) worst = std::max(worst, -r.rate);
      }
      const double direct = plan.flows[e].toStation.at(a.id);
      if (direct < 0) worst = std::max(worst, -direct);
      const double mass = std::max(in + a.ingress, 1e-300);
      worst = std::max(worst, std::abs(in + a.ingress - out - direct) / mass);
    }
  }
  return worst;
}

double head_cycle_residual(const HeadLayerPlan& p) {
  double epochSum = 0;
  for (double d : p.epochDurations) epochSum += d;
  return std::max(rel_err(p.travelTime + p.charge_time() + p.vacation, p.cycleTime),
                  rel_err(epochSum, p.cycleTime));
}

double cluster_cycle_residual(const ClusterPlan& p) {
  if (!std::isfinite(p.cycleTime)) return 0.0;
  double stops = 0;
  for (double d : p.stopDurations) stops += d;
  return std::max(rel_err(p.travelTime + p.charge_time() + p.vacation, p.cycleTime),
                  rel_err(stops, p.charge_time()));
}

// Right-hand side of the joint vacation formula, from cluster summaries.
double joint_vacation_formula(const JointPlan& j, const HeadSummary& head,
                              const std::vector<ClusterSummary>& cs) {
  double spent = 0;
  for (const ClusterSummary& c : cs) {
    if (!std::isfinite(c.cycleTime)) continue;
    spent += c.chargeTime / c.cycleTime * j.period + c.travelTime;
  }
  return j.subPeriods * head.vacation - spent;
}

Scenario single_node() {
  const Point center = cell_center({2, 2}, 0.1);
  return Scenario(Area{1, 1}, {{1, {center.x, center.y + 0.2}, 0.0}, {2, center, 1.0}},
                  NetworkParams{});
}

std::string verdict_note(const std::string& what, const RenewVerdict& v) {
  return fmt::format("{} {}", what, describe(v));
}

}  // namespace

int main() {
  const Scenario table1 = load_builtin_table1();
  const double speed = table1.params().speed;

  // 1. Baseline on the reference network.
  const auto t1 = std::chrono::steady_clock::now();
  const RunResult base = run_pipeline(table1, baseline_settings());
  const double baseSecs = seconds_since(t1);
  const HeadLayerPlan& bp = *base.baseline;
  {
    Verdict v;
    v.need(bp.objective >= 0.63 && bp.objective <= 0.73,
           fmt::format("eta = {:.4f} (want [0.63, 0.73], reference 0.68)", bp.objective));
    v.need(bp.tour.length <= 1.10 * 4.89,
           fmt::format("tour = {:.4f} over {} stops (want <= {:.3f})", bp.tour.length,
                       bp.stops.size(), 1.10 * 4.89));
    v.need(baseSecs <= 120.0, fmt::format("runtime {:.2f} s (want <= 120)", baseSecs));
    report(1, "baseline reproduction", v);
  }

  // 2. TLFW head layer with m = 4 and 16 restarts.
  TlfwRun tl = run_tlfw(table1, tlfw_settings());
  {
    Verdict v;
    if (!tl.result.headPlan) {
      v.need(false, "no head plan: " + tl.infeasible);
    } else {
      const HeadLayerPlan& h = *tl.result.headPlan;
      const double frac = h.vacation / h.cycleTime;
      v.need(within(h.tour.length, 2.54, 0.6),
             fmt::format("D_P = {:.4f} (want 2.54 +- 0.6)", h.tour.length));
      v.need(within(frac, 0.729, 0.08),
             fmt::format("tau_vac/tau = {:.2f}/{:.2f} = {:.4f} (want 0.729 +- 0.08)", h.vacation,
                         h.cycleTime, frac));
    }
    v.need(tl.seconds <= 10.0, fmt::format("pipeline runtime {:.3f} s (want <= 10){}", tl.seconds,
                                           tl.infeasible.empty() ? "" : ", ending infeasible"));
    report(2, "head layer", v);
  }

  // 3. Joint period on the reference network.
  {
    Verdict v;
    if (!tl.result.joint) {
      v.need(false, "no joint plan: " + tl.infeasible);
      v.info("reference eta_total 0.71, formula value from the reference breakdown 0.669");
    } else {
      const JointPlan& j = *tl.result.joint;
      v.need(j.period >= 5000 && j.period <= 7500,
             fmt::format("T = {:.1f} (want [5000, 7500], reference 6134)", j.period));
      v.need(within_rel(j.breakdown.headChargeTime, 1115, 0.25),
             fmt::format("head charge {:.1f} (want 1115 +- 25%)", j.breakdown.headChargeTime));
      v.need(within_rel(j.breakdown.headTravelTime, 543, 0.25),
             fmt::format("head travel {:.1f} (want 543 +- 25%)", j.breakdown.headTravelTime));
      v.need(within_rel(j.breakdown.normalChargeTime, 291, 0.30),
             fmt::format("normal charge {:.1f} (want 291 +- 30%)", j.breakdown.normalChargeTime));
      v.need(j.objective >= bp.objective - 0.05,
             fmt::format("eta_total = {:.4f} vs baseline {:.4f} - 0.05 (reference 0.71, 0.669 by "
                         "its own breakdown)",
                         j.objective, bp.objective));
      std::vector<ClusterSummary> cs;
      for (const ClusterPlan& p : tl.result.clusterPlans) cs.push_back(summarize(p));
      const double rhs = joint_vacation_formula(j, summarize(*tl.result.headPlan), cs);
      v.need(rel_err(j.vacation, rhs) <= 1e-6,
             fmt::format("T_vac = {:.6g}, formula {:.6g}", j.vacation, rhs));
    }
    report(3, "joint period", v);
  }

  // 4. Joint arithmetic from the reference inputs.
  {
    Verdict v;
    const double tau[] = {10717, 8771.3, 8520, 6134};
    const double tc[] = {30, 56, 89, 171};
    const double dtsp[] = {1.3196, 1.239, 1.5124, 1.732};
    std::vector<ClusterSummary> cs;
    for (int i = 0; i < 4; ++i) cs.push_back({tau[i], tc[i], dtsp[i] / speed, tau[i], {}, i + 1});
    const JointPlan j = solve_joint(cs, HeadSummary{286.8, 209.1, 52.3, 25.425}, 4);
    v.need(within(j.period, 6134, 1e-9 * 6134), fmt::format("T = {:.3f}", j.period));
    v.need(within(j.subPeriods, 21.388, 1e-3), fmt::format("h = {:.4f}", j.subPeriods));
    const double want[] = {17.2, 39.2, 64.1, 171.0};
    bool ok = true;
    std::string got;
    for (int i = 0; i < 4; ++i) {
      ok = ok && within(j.scaledChargeTimes[i], want[i], 0.2);
      got += fmt::format("{}{:.2f}", i ? ", " : "", j.scaledChargeTimes[i]);
    }
    v.need(ok, "scaled charge times {" + got + "} (want {17.2, 39.2, 64.1, 171.0} +- 0.2)");
    report(4, "reference joint arithmetic", v);
  }

  // 5. Every accepted plan is renewable over 3 simulated periods.
  {
    Verdict v;
    SimOptions so;
    const RenewVerdict b = check_renewable(simulate_head_layer(table1, bp, so), 0.02);
    v.need(b.pass, verdict_note("baseline:", b));

    std::size_t clusterPass = 0, clusterCount = 0;
    std::string clusterFail;
    for (const ClusterPlan& p : tl.result.clusterPlans) {
      if (!std::isfinite(p.cycleTime)) continue;
      ++clusterCount;
      const RenewVerdict c = check_renewable(simulate_cluster(table1, p, so), 0.02);
      if (c.pass) ++clusterPass;
      else clusterFail += fmt::format(" head {}: {}", p.headId, describe(c));
    }
    v.need(clusterPass == clusterCount,
           fmt::format("reference clusters alone {}/{} renewable{}", clusterPass, clusterCount,
                       clusterFail));
    if (!tl.result.joint) v.info("reference joint plan not accepted (infeasible), not simulated");

    const Scenario gen = generate_scenario(3, 12, Area{1, 1}, RateRange{0.002, 0.01});
    TlfwRun g = run_tlfw(gen, tlfw_settings(2, 4));
    if (g.result.joint) {
      const RenewVerdict j = check_renewable(trace_result(g.result, so.dt, so.periods), 0.02);
      v.need(j.pass, verdict_note("generated 12-node joint plan:", j));
      for (const ClusterPlan& p : g.result.clusterPlans) {
        if (!std::isfinite(p.cycleTime)) continue;
        const RenewVerdict c = check_renewable(simulate_cluster(gen, p, so), 0.02);
        v.need(c.pass, verdict_note(fmt::format("its cluster of head {} alone:", p.headId), c));
      }
    } else {
      v.info("generated 12-node joint plan infeasible, not simulated: " + g.infeasible);
    }

    const Scenario one = single_node();
    const Cluster c1{1, {2}};
    const ClusterPlan sp = solve_cluster_plan(one, c1, occupied_cells(one, c1, 0.1));
    const RenewVerdict s = check_renewable(simulate_cluster(one, sp, so), 0.0);
    v.need(s.pass, verdict_note("single node, zero margin:", s));
    report(5, "renewability", v);
  }

  // 6. Simplex against vertex enumeration.
  {
    Verdict v;
    std::mt19937_64 rng(6006);
    int matched = 0, verified = 0;
    double worst = 0;
    for (int k = 0; k < 200; ++k) {
      const lp::Problem p = oracle::random_problem(rng, true);
      const auto best = oracle::vertex_optimum(p);
      const lp::Solution s = lp::solve(p);
      if (best && s.status == lp::Status::Optimal) {
        const double err = std::abs(s.objectiveValue - *best) / std::max(1.0, std::abs(*best));
        worst = std::max(worst, err);
        if (err <= 1e-6) ++matched;
        if (lp::verify(p, s).within(1e-9)) ++verified;
      }
    }
    v.need(matched == 200, fmt::format("{}/200 optima match (worst {:.2e})", matched, worst));
    v.need(verified == 200, fmt::format("{}/200 verify at 1e-9", verified));
    report(6, "lp oracle", v);
  }

  // 7. Structural properties.
  {
    Verdict v;
    double flow = flow_residual(bp);
    if (tl.result.headPlan) flow = std::max(flow, flow_residual(*tl.result.headPlan));
    v.need(flow <= 1e-9, fmt::format("flow conservation {:.2e}", flow));

    double cyc = head_cycle_residual(bp);
    if (tl.result.headPlan) cyc = std::max(cyc, head_cycle_residual(*tl.result.headPlan));
    for (const ClusterPlan& p : tl.result.clusterPlans) cyc = std::max(cyc, cluster_cycle_residual(p));
    v.need(cyc <= 1e-6, fmt::format("cycle identities {:.2e}", cyc));

    std::mt19937_64 rng(7007);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int tspBad = 0, tspCount = 0;
    for (std::size_t n = 1; n <= 8; ++n)
      for (int k = 0; k < 25; ++k, ++tspCount) {
        std::vector<Point> pts(n);
        for (Point& p : pts) p = {u(rng), u(rng)};
        const Tour h = heuristic_tour(pts, rng());
        const double exact = n < 3 ? tour_length(exact_tour(pts)) : oracle::brute_force(pts);
        if (h.length < exact - 1e-9 || !two_opt_stable(h) ||
            std::abs(exact_tour(pts).length - exact) > 1e-9)
          ++tspBad;
      }
    v.need(tspBad == 0, fmt::format("tsp {}/{} instances ok", tspCount - tspBad, tspCount));

    std::uniform_real_distribution<double> w(-2.0, 2.0);
    double hexWorst = 0;
    for (int k = 0; k < 10000; ++k) {
      const Point p{w(rng), w(rng)};
      hexWorst = std::max(hexWorst, distance(p, cell_center(cell_index(p, 0.1), 0.1)));
    }
    v.need(hexWorst <= 0.1 + 1e-12, fmt::format("hex max distance {:.6f} (side 0.1)", hexWorst));

    int monoBad = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Scenario s = generate_scenario(seed, 40);
      std::mt19937_64 r(seed);
      const ClusterRun run = run_clustering(s, seed_heads(s, 4, r), 100, HeadUpdate::ExactMedoid);
      for (std::size_t k = 1; k < run.costHistory.size(); ++k)
        if (run.costHistory[k] > run.costHistory[k - 1] * (1 + 1e-12)) ++monoBad;
    }
    v.need(monoBad == 0, fmt::format("medoid cost increases: {}", monoBad));
    report(7, "structural properties", v);
  }

  // 8. Identical settings give identical reports.
  {
    Verdict v;
    const std::string a = report_to_json(base).dump();
    const std::string b = report_to_json(run_pipeline(table1, baseline_settings())).dump();
    v.need(a == b, fmt::format("baseline reports {} ({} bytes)", a == b ? "identical" : "differ",
                               a.size()));
    RunSettings gs = tlfw_settings(2, 4);
    gs.simulate = true;
    const Scenario gen = generate_scenario(3, 12, Area{1, 1}, RateRange{0.002, 0.01});
    TlfwRun g1 = run_tlfw(gen, gs), g2 = run_tlfw(gen, gs);
    gs.jobs = 4;
    TlfwRun g3 = run_tlfw(gen, gs);
    const std::string r1 = report_to_json(g1.result).dump(), r2 = report_to_json(g2.result).dump();
    v.need(r1 == r2, fmt::format("tlfw reports {}", r1 == r2 ? "identical" : "differ"));
    RunResult job4 = g3.result;
    job4.settings.jobs = 1;
    v.need(report_to_json(job4).dump() == r1, "4 workers give the same plans as 1");
    report(8, "determinism", v);
  }

  // Not a criterion: the alternate efficiency curve on the same seeds.
  {
    NetworkParams p = table1.params();
    p.muCoeffs = mu_presets::kAlternate;
    const Scenario alt(table1.area(), table1.nodes(), p);
    const RunResult ab = run_pipeline(alt, baseline_settings());
    TlfwRun at = run_tlfw(alt, tlfw_settings());
    std::string tail = at.result.joint
                           ? fmt::format("tlfw eta_total {:.4f}, T = {:.1f}", at.result.joint->objective,
                                         at.result.joint->period)
                           : "tlfw " + at.infeasible;
    std::puts(fmt::format("INFO alternate efficiency curve: baseline eta {:.4f}, tour {:.4f}; {}",
                          ab.baseline->objective, ab.baseline->tour.length, tail)
                  .c_str());
  }

  std::puts(fmt::format("{} of 8 criteria failed", failures).c_str());
  return failures == 0 ? 0 : 1;
}
