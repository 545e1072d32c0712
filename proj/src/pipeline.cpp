#include "tlfw/pipeline.hpp"

#include <chrono>
#include <future>
#include <limits>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "tlfw/error.hpp"
#include "tlfw/random.hpp"

namespace tlfw {

namespace {

constexpr std::size_t kBaselinePruneK = 6;

class StageTimer {
 public:
  explicit StageTimer(const char* name) : name_(name), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start_;
    spdlog::debug("{}: {:.3f} s", name_, d.count());
  }

 private:
  const char* name_;
  std::chrono::steady_clock::time_point start_;
};

ClusterPlan solve_one(const Scenario& scenario, const Cluster& cluster, std::size_t index,
                      std::uint64_t seed) {
  const CellPlan cells = occupied_cells(scenario, cluster, scenario.params().dDelta);
  try {
    ClusterPlan plan =
        solve_cluster_plan(scenario, cluster, cells, derive_seed(seed, "tour", index));
    plan.clusterIndex = index;
    return plan;
  } catch (const DegenerateError&) {
    spdlog::info("cluster of head {} consumes no energy; it needs no charging tour",
                 cluster.headId);
    return degenerate_cluster_plan(scenario, cluster, index);
  }
}

}  // namespace

std::size_t RunSettings::prune_k() const {
  if (pruneK) return *pruneK;
  return mode == HeadMode::MsirsnBaseline ? kBaselinePruneK : 0;
}

ClusterPlan degenerate_cluster_plan(const Scenario& scenario, const Cluster& cluster,
                                    std::size_t index) {
  const double inf = std::numeric_limits<double>::infinity();
  ClusterPlan plan;
  plan.clusterIndex = index;
  plan.headId = cluster.headId;
  plan.cells.side = scenario.params().dDelta;
  plan.tour.waypoints = {scenario.node(cluster.headId).pos};
  plan.tour.order = {0};
  plan.cycleTime = inf;
  plan.maxCycle = inf;
  plan.objective = 1.0;
  return plan;
}

std::vector<ClusterPlan> solve_cluster_plans(const Scenario& scenario, const Clustering& clustering,
                                             std::uint64_t seed, std::size_t jobs) {
  const std::size_t m = clustering.m();
  std::vector<ClusterPlan> plans(m);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < m; ++i) plans[i] = solve_one(scenario, clustering.clusters[i], i, seed);
    return plans;
  }
  for (std::size_t base = 0; base < m; base += jobs) {
    std::vector<std::future<ClusterPlan>> pending;
    for (std::size_t i = base; i < std::min(m, base + jobs); ++i)
      pending.push_back(std::async(std::launch::async, solve_one, std::cref(scenario),
                                   std::cref(clustering.clusters[i]), i, seed));
    for (std::size_t k = 0; k < pending.size(); ++k) plans[base + k] = pending[k].get();
  }
  return plans;
}

RunResult run_pipeline(const Scenario& scenario, const RunSettings& settings, RunResult* partial) {
  RunResult local{scenario, settings};
  RunResult& r = partial ? *partial : local;
  if (partial) *partial = RunResult{scenario, settings};
  StageTimer total("pipeline");

  HeadPlanOptions ho;
  ho.segMax = settings.segMax;
  ho.pruneK = settings.prune_k();
  ho.seed = derive_seed(settings.seed, "head-tour");
  ho.lpDump = settings.lpDump;

  if (settings.mode == HeadMode::MsirsnBaseline) {
    StageTimer t("baseline plan");
    r.baseline = solve_baseline_plan(scenario, ho);
  } else {
    {
      StageTimer t("clustering");
      ClusterOptions co;
      co.m = settings.clusters;
      co.seed = settings.seed;
      co.restarts = settings.restarts;
      co.variant = settings.variant;
      co.jobs = settings.jobs;
      r.clustering = cluster(scenario, co);
      r.commCost = comm_cost(scenario, *r.clustering);
    }
    {
      StageTimer t("cluster plans");
      r.clusterPlans = solve_cluster_plans(scenario, *r.clustering, settings.seed, settings.jobs);
    }
    {
      StageTimer t("head plan");
      r.headPlan = solve_tlfw_head_plan(scenario, *r.clustering, ho);
    }
    StageTimer t("joint");
    std::vector<ClusterSummary> sums;
    for (const ClusterPlan& p : r.clusterPlans) sums.push_back(summarize(p));
    r.joint = solve_joint(sums, summarize(*r.headPlan), r.clustering->m());
  }

  if (settings.simulate) {
    StageTimer t("simulation");
    r.simulation = simulate_result(r, settings.dt, settings.periods, settings.marginFrac);
  }
  return partial ? *partial : local;
}

Trace trace_result(const RunResult& r, double dt, std::size_t periods) {
  SimOptions o;
  o.dt = dt;
  o.periods = periods;
  if (r.baseline) return simulate_head_layer(r.scenario, *r.baseline, o);
  if (!r.clustering || !r.headPlan || !r.joint)
    throw InputError("report holds no complete plan to simulate");
  return simulate(r.scenario, *r.clustering, *r.joint, *r.headPlan, r.clusterPlans, o);
}

SimulationSummary simulate_result(const RunResult& r, double dt, std::size_t periods,
                                  double marginFrac) {
  return SimulationSummary{dt, periods, check_renewable(trace_result(r, dt, periods), marginFrac)};
}

}  // namespace tlfw
