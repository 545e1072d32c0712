#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tlfw/error.hpp"
#include "tlfw/json_io.hpp"
#include "tlfw/report.hpp"

namespace py = pybind11;
using namespace tlfw;
using nlohmann::json;

namespace {

Scenario scenario_of(const std::string& text) { return scenario_from_json(json::parse(text)); }

std::string run(const std::string& scenario, const std::string& mode, std::size_t clusters,
                std::uint64_t seed, std::size_t restarts, const std::string& variant,
                double segMax, long long pruneK, std::size_t jobs, bool simulate, double dt,
                std::size_t periods) {
  RunSettings s;
  s.mode = mode == "msirsn" ? HeadMode::MsirsnBaseline : HeadMode::TlfwHeads;
  if (mode != "msirsn" && mode != "tlfw") throw InputError("mode must be 'tlfw' or 'msirsn'");
  s.clusters = clusters;
  s.seed = seed;
  s.restarts = restarts;
  s.variant = head_update_from_string(variant);
  s.segMax = segMax;
  if (pruneK >= 0) s.pruneK = static_cast<std::size_t>(pruneK);
  s.jobs = jobs;
  s.simulate = simulate;
  s.dt = dt;
  s.periods = periods;
  s.source = "python";
  const Scenario sc = scenario.empty() ? load_builtin_table1() : scenario_of(scenario);
  RunResult r = [&] {
    py::gil_scoped_release release;
    return run_pipeline(sc, s);
  }();
  return report_to_json(r).dump();
}

std::string validate(const std::string& report, double dt, std::size_t periods, double margin) {
  const RunResult r = result_from_json(json::parse(report));
  const RenewVerdict v = check_renewable(trace_result(r, dt, periods), margin);
  json failures = json::array();
  for (const RenewFailure& f : v.failures)
    failures.push_back({{"kind", f.kind == RenewFailure::Kind::BelowMin ? "below_min" : "declining"},
                        {"node", f.nodeId},
                        {"period", f.period},
                        {"time", f.time},
                        {"value", f.value}});
  return json{{"pass", v.pass},
              {"threshold", v.threshold},
              {"min_energy", v.minEnergy},
              {"min_node", v.minNode},
              {"failures", failures},
              {"message", describe(v)}}
      .dump();
}

std::string joint(const std::vector<std::map<std::string, double>>& clusters,
                  const std::map<std::string, double>& head) {
  std::vector<ClusterSummary> cs;
  int id = 0;
  for (const auto& c : clusters) {
    ClusterSummary s;
    s.cycleTime = c.at("cycle_time");
    s.chargeTime = c.at("charge_time");
    s.travelTime = c.at("travel_time");
    s.maxCycle = c.count("max_cycle") ? c.at("max_cycle") : s.cycleTime;
    s.headId = ++id;
    cs.push_back(s);
  }
  const HeadSummary h{head.at("cycle_time"), head.at("vacation"), head.at("charge_time"),
                      head.at("travel_time")};
  const JointPlan j = solve_joint(cs, h, cs.size());
  return json{{"period", j.period},
              {"sub_periods", j.subPeriods},
              {"scaled_charge_times", j.scaledChargeTimes},
              {"breakdown",
               {{"head_charge_time", j.breakdown.headChargeTime},
                {"head_travel_time", j.breakdown.headTravelTime},
                {"normal_charge_time", j.breakdown.normalChargeTime},
                {"normal_travel_time", j.breakdown.normalTravelTime}}},
              {"vacation", j.vacation},
              {"objective", j.objective}}
      .dump();
}

}  // namespace

PYBIND11_MODULE(_tlfw, m) {
  m.doc() = "Native core of the tlfw charging planner";

  static py::exception<Error> base(m, "Error");
  static py::exception<InputError> input(m, "InputError", base.ptr());
  static py::exception<InfeasibleError> infeasible(m, "InfeasibleError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InfeasibleError& e) {
      py::set_error(infeasible, e.what());
    } catch (const InputError& e) {
      py::set_error(input, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    } catch (const json::exception& e) {
      py::set_error(input, e.what());
    }
  });

  m.def("builtin_table1", [] { return scenario_to_json(load_builtin_table1()).dump(); });
  m.def(
      "generate_scenario",
      [](std::uint64_t seed, std::size_t n, double lo, double hi) {
        return scenario_to_json(generate_scenario(seed, n, Area{1, 1}, RateRange{lo, hi})).dump();
      },
      py::arg("seed"), py::arg("n"), py::arg("rate_lo") = 0.1, py::arg("rate_hi") = 1.0);
  m.def("run", &run, py::arg("scenario"), py::arg("mode"), py::arg("clusters"), py::arg("seed"),
        py::arg("restarts"), py::arg("variant"), py::arg("seg_max"), py::arg("prune_k"),
        py::arg("jobs"), py::arg("simulate"), py::arg("dt"), py::arg("periods"));
  m.def("validate", &validate, py::arg("report"), py::arg("dt"), py::arg("periods"),
        py::arg("margin"));
  m.def("render_svg", [](const std::string& report) {
    return render_svg(result_from_json(json::parse(report)));
  });
  m.def("solve_joint", &joint, py::arg("clusters"), py::arg("head"));
}
