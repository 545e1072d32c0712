#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tlfw/error.hpp"
#include "tlfw/sim.hpp"

using namespace tlfw;

namespace {

Scenario single_node(double rate = 1.0) {
  const Point center = cell_center({2, 2}, 0.1);
  return Scenario(Area{1, 1}, {{1, {center.x, center.y + 0.2}, 0.0}, {2, center, rate}},
                  NetworkParams{});
}

ClusterPlan single_plan(const Scenario& s) {
  const Cluster c{1, {2}};
  return solve_cluster_plan(s, c, occupied_cells(s, c, 0.1));
}

Trace synthetic(std::vector<double> values, double eMin = 500, double eMax = 10000) {
  Trace t;
  t.dt = 1;
  t.period = 10;
  t.periods = 3;
  t.eMin = eMin;
  t.eMax = eMax;
  t.nodeIds = {7};
  for (std::size_t p = 0; p < 3; ++p) {
    NodePeriodStats st{values[p], values[p + 1], std::min(values[p], values[p + 1]), 10.0 * p + 5, 0, 0};
    t.stats.push_back({st});
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    t.times.push_back(10.0 * k);
    t.energy.push_back({values[k]});
  }
  return t;
}

}  // namespace

TEST_CASE("check_renewable on synthetic traces") {
  CHECK(check_renewable(synthetic({10000, 10000, 10000, 10000})).pass);

  Trace dip = synthetic({10000, 10000, 10000, 10000});
  dip.stats[1][0].min = 500 - 0.05 * 10000;
  dip.stats[1][0].minTime = 14.5;
  const RenewVerdict v = check_renewable(dip);
  CHECK_FALSE(v.pass);
  REQUIRE(v.failures.size() == 1);
  CHECK(v.failures[0].kind == RenewFailure::Kind::BelowMin);
  CHECK(v.failures[0].nodeId == 7);
  CHECK(v.failures[0].time == 14.5);
  CHECK(describe(v).find("node 7") != std::string::npos);

  // A drop from period 1 to 2 is transient; from 2 to 3 it is not.
  CHECK(check_renewable(synthetic({10000, 9000, 9000, 9000})).pass);
  const RenewVerdict d = check_renewable(synthetic({10000, 9000, 9000, 8999}));
  CHECK_FALSE(d.pass);
  CHECK(d.failures[0].kind == RenewFailure::Kind::Declining);
  CHECK(check_renewable(synthetic({10000, 9000, 9000, 9000 - 0.5e-6 * 10000})).pass);
}

TEST_CASE("flat trace without consumption") {
  const Scenario s = single_node(0.0);
  ClusterPlan plan;
  plan.headId = 1;
  plan.cells = occupied_cells(s, Cluster{1, {2}}, 0.1);
  plan.tour = shortest_tour(std::vector<Point>{s.node(1).pos, plan.cells.cells[0].hex.center}, 1);
  plan.stopDurations = {2.0};
  plan.vacation = 10.0;
  const Trace tr = simulate_cluster(s, plan);
  for (const auto& row : tr.energy) CHECK(row[0] == 10000.0);
  CHECK(check_renewable(tr, 0.0).pass);
  CHECK(tr.period == doctest::Approx(10 + 2 + 4));
}

TEST_CASE("single-node cluster reaches E_min exactly") {
  const Scenario s = single_node();
  const ClusterPlan plan = single_plan(s);
  const Trace tr = simulate_cluster(s, plan);
  const RenewVerdict v = check_renewable(tr);
  CHECK(v.pass);
  CHECK(std::abs(v.minEnergy - 500.0) <= 0.01 * 10000);
  CHECK(std::abs(v.minEnergy - 500.0) <= 1e-6);
  CHECK(check_renewable(tr, 0.0).pass);

  for (const auto& row : tr.energy) CHECK(row[0] <= 10000.0 + 1e-9);
  for (const auto& period : tr.stats) {
    const NodePeriodStats& st = period[0];
    CHECK(std::abs(st.charged - st.consumed - (st.end - st.start)) <= 1e-6);
  }
  // Steady-state period: the node is charged exactly what it consumes.
  CHECK(tr.stats[2][0].charged == doctest::Approx(tr.stats[2][0].consumed).epsilon(1e-9));

  SimOptions half;
  half.dt = 0.025;
  const Trace fine = simulate_cluster(s, plan, half);
  const double rate = 1.0016;
  CHECK(std::abs(check_renewable(fine).minEnergy - v.minEnergy) <= rate * 0.05);

  std::size_t charges = 0;
  for (const SimEvent& e : tr.events)
    if (e.kind == SimEventKind::Charge) {
      ++charges;
      CHECK(e.duration == doctest::Approx(plan.stopDurations[0]));
    }
  CHECK(charges == 3);
}

TEST_CASE("simulation input checks") {
  const Scenario s = single_node();
  const ClusterPlan plan = single_plan(s);
  SimOptions big;
  big.dt = plan.stopDurations[0] * 2;
  CHECK_THROWS_AS(simulate_cluster(s, plan, big), InputError);
  SimOptions one;
  one.periods = 1;
  CHECK_THROWS_AS(simulate_cluster(s, plan, one), InputError);
  SimOptions zero;
  zero.dt = 0;
  CHECK_THROWS_AS(simulate_cluster(s, plan, zero), InputError);

  ClusterPlan broken = plan;
  broken.stopDurations.clear();
  CHECK_THROWS_AS(simulate_cluster(s, broken), InputError);
}

TEST_CASE("head layer at the station is exactly renewable") {
  const Scenario s(Area{1, 1}, {{1, {0.5, 0.5}, 1.0}}, NetworkParams{});
  const Clustering c{{Cluster{1, {}}}};
  const HeadLayerPlan plan = solve_tlfw_head_plan(s, c);
  const Trace tr = simulate_head_layer(s, plan);
  const RenewVerdict v = check_renewable(tr, 0.0);
  CHECK(v.pass);
  CHECK(std::abs(v.minEnergy - 500) <= 1e-6);
}

TEST_CASE("joint simulation structure") {
  const Scenario s = generate_scenario(3, 12, Area{1, 1}, RateRange{0.002, 0.01});
  ClusterOptions co;
  co.m = 2;
  const Clustering c = cluster(s, co);
  std::vector<ClusterPlan> plans;
  std::vector<ClusterSummary> sums;
  for (const Cluster& cl : c.clusters) {
    plans.push_back(solve_cluster_plan(s, cl, occupied_cells(s, cl, 0.1)));
    sums.push_back(summarize(plans.back()));
  }
  const HeadLayerPlan head = solve_tlfw_head_plan(s, c);
  const JointPlan j = solve_joint(sums, summarize(head), 2);
  const Trace tr = simulate(s, c, j, head, plans);
  CHECK(tr.period == doctest::Approx(j.period).epsilon(1e-9));
  CHECK(tr.nodeIds.size() == s.size());
  for (const auto& row : tr.energy)
    for (double e : row) CHECK(e <= 10000.0 + 1e-9);
  for (const auto& period : tr.stats)
    for (const NodePeriodStats& st : period)
      CHECK(std::abs(st.charged - st.consumed - (st.end - st.start)) <= 1e-6 * 10000);

  std::size_t cellVisits = 0;
  for (const SimEvent& e : tr.events)
    if (e.kind == SimEventKind::Arrive && e.stop.rfind("cluster", 0) == 0) ++cellVisits;
  CHECK(cellVisits == 3 * (plans[0].cells.cells.size() + plans[1].cells.cells.size()));

  std::vector<ClusterPlan> one(plans.begin(), plans.begin() + 1);
  CHECK_THROWS_AS(simulate(s, c, j, head, one), InputError);
  std::vector<ClusterPlan> swapped{plans[1], plans[0]};
  CHECK_THROWS_AS(simulate(s, c, j, head, swapped), InputError);
}

TEST_CASE("trace csv") {
  const Scenario s = single_node();
  SimOptions o;
  o.sampleInterval = 1000;
  const Trace tr = simulate_cluster(s, single_plan(s), o);
  std::ostringstream os;
  write_trace_csv(tr, os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "time,node_id,energy");
  std::getline(in, line);
  CHECK(line == "0,2,10000");
  std::size_t rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == tr.times.size());
}
