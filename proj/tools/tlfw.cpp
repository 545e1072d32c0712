#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "tlfw/error.hpp"
#include "tlfw/report.hpp"

namespace fs = std::filesystem;
using namespace tlfw;

namespace {

enum Exit { kOk = 0, kInternal = 1, kInfeasible = 2, kInvalid = 3, kNotRenewable = 4 };

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("tlfw");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("TLFW_LOG")) {
    const std::string v = env;
    if (v == "error") spdlog::set_level(spdlog::level::err);
    else if (v == "warn") spdlog::set_level(spdlog::level::warn);
    else if (v == "info") spdlog::set_level(spdlog::level::info);
    else if (v == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::warn("ignoring TLFW_LOG='{}' (expected error, warn, info or debug)", v);
  }
}

// Writes next to the target and renames, so a failed run never leaves a partial file.
void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += fmt::format(".tmp{}", std::chrono::steady_clock::now().time_since_epoch().count());
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InputError(fmt::format("cannot write '{}'", path));
    out << content;
    out.close();
    if (!out) {
      fs::remove(tmp);
      throw InputError(fmt::format("cannot write '{}'", path));
    }
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read '{}'", path));
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunResult load_report(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(fmt::format("report '{}' is not valid JSON: {}", path, e.what()));
  }
  return result_from_json(doc);
}

std::string trace_csv(const Trace& tr) {
  std::ostringstream s;
  write_trace_csv(tr, s);
  return s.str();
}

struct RunFlags {
  std::string builtin, scenario, variant = "centroid-snap", mode = "tlfw", muPreset;
  std::string out, svg, trace, lpDump;
  std::size_t clusters = 4, restarts = 16, jobs = 1, periods = 3;
  long long pruneK = -1;
  std::uint64_t seed = 42;
  double segMax = 0.25, dt = 0.05, margin = 0.02;
  bool simulate = false;
};

int cmd_run(const RunFlags& f) {
  const auto t0 = std::chrono::steady_clock::now();
  if (f.builtin.empty() == f.scenario.empty())
    throw InputError("exactly one of --builtin table1 or --scenario FILE is required");
  Scenario scenario = f.scenario.empty() ? load_builtin_table1() : load_scenario_file(f.scenario);
  if (!f.muPreset.empty()) {
    NetworkParams p = scenario.params();
    p.muCoeffs = f.muPreset == "alternate" ? mu_presets::kAlternate : mu_presets::kLiteral;
    scenario = Scenario(scenario.area(), scenario.nodes(), p);
  }

  RunSettings s;
  s.mode = f.mode == "msirsn" ? HeadMode::MsirsnBaseline : HeadMode::TlfwHeads;
  s.clusters = f.clusters;
  s.seed = f.seed;
  s.restarts = f.restarts;
  s.variant = head_update_from_string(f.variant);
  s.segMax = f.segMax;
  if (f.pruneK >= 0) s.pruneK = static_cast<std::size_t>(f.pruneK);
  s.jobs = std::max<std::size_t>(f.jobs, 1);
  s.simulate = f.simulate || !f.trace.empty();
  s.dt = f.dt;
  s.periods = f.periods;
  s.marginFrac = f.margin;
  s.source = f.scenario.empty() ? "builtin:" + f.builtin : "file:" + fs::path(f.scenario).filename().string();
  if (!f.muPreset.empty()) s.source += "+mu:" + f.muPreset;

  std::ostringstream dump;
  if (!f.lpDump.empty()) s.lpDump = &dump;

  RunResult result = run_pipeline(scenario, s);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!f.lpDump.empty()) write_atomic(f.lpDump, dump.str());

  const nlohmann::json doc = report_to_json(result, utc_timestamp());
  if (!f.trace.empty()) write_atomic(f.trace, trace_csv(trace_result(result, s.dt, s.periods)));
  if (!f.svg.empty()) write_atomic(f.svg, render_svg(result));
  if (!f.out.empty()) write_atomic(f.out, doc.dump(2) + "\n");

  if (result.baseline) {
    const HeadLayerPlan& b = *result.baseline;
    std::cout << fmt::format("msirsn: eta = {:.4f}, tau = {:.2f}, tour = {:.4f} ({} stops), prune_k = {}\n",
                             b.objective, b.cycleTime, b.tour.length, b.stops.size(), b.pruneK);
  } else {
    const HeadLayerPlan& h = *result.headPlan;
    const JointPlan& j = *result.joint;
    std::cout << fmt::format("tlfw: heads tau = {:.2f}, tau_vac = {:.2f}, D_P = {:.4f}, eta_head = {:.4f}\n",
                             h.cycleTime, h.vacation, h.tour.length, h.objective);
    std::cout << fmt::format("joint: T = {:.2f}, h = {:.4f}, T_vac = {:.2f}, eta_total = {:.4f}\n", j.period,
                             j.subPeriods, j.vacation, j.objective);
  }
  if (result.simulation) std::cout << "simulation: " << describe(result.simulation->verdict) << "\n";
  std::cout << fmt::format("runtime: {:.2f} s\n", secs);
  return kOk;
}

int cmd_validate(const std::string& report, double dt, std::size_t periods, double margin,
                 const std::string& trace) {
  const RunResult r = load_report(report);
  const Trace tr = trace_result(r, dt, periods);
  if (!trace.empty()) write_atomic(trace, trace_csv(tr));
  const RenewVerdict v = check_renewable(tr, margin);
  std::cout << describe(v) << "\n";
  return v.pass ? kOk : kNotRenewable;
}

int cmd_render(const std::string& report, const std::string& svg) {
  const RunResult r = load_report(report);
  const std::string doc = render_svg(r);
  if (svg.empty()) std::cout << doc;
  else write_atomic(svg, doc);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Charging schedules for rechargeable sensor networks with a mobile base station"};
  app.require_subcommand(1);

  RunFlags f;
  CLI::App* run = app.add_subcommand("run", "plan schedules and write a report");
  auto* builtin = run->add_option("--builtin", f.builtin, "built-in scenario")->check(CLI::IsMember({"table1"}));
  auto* scenarioOpt = run->add_option("--scenario", f.scenario, "scenario JSON file");
  builtin->excludes(scenarioOpt);
  run->add_option("--clusters", f.clusters, "number of clusters")->check(CLI::PositiveNumber);
  run->add_option("--seed", f.seed, "master seed");
  run->add_option("--restarts", f.restarts, "clustering restarts")->check(CLI::PositiveNumber);
  run->add_option("--variant", f.variant, "head update rule")
      ->check(CLI::IsMember({"centroid-snap", "exact-medoid"}));
  run->add_option("--mode", f.mode, "tlfw or msirsn")->check(CLI::IsMember({"tlfw", "msirsn"}));
  run->add_option("--seg-max", f.segMax, "longest move segment")->check(CLI::PositiveNumber);
  run->add_option("--prune-k", f.pruneK, "relay arcs per node (0 = full mesh)")->check(CLI::NonNegativeNumber);
  run->add_option("--jobs", f.jobs, "parallel workers")->check(CLI::PositiveNumber);
  run->add_option("--out", f.out, "JSON report");
  run->add_option("--svg", f.svg, "SVG rendering");
  run->add_option("--trace", f.trace, "battery trace CSV (implies --simulate)");
  run->add_flag("--simulate", f.simulate, "validate the plan by simulation");
  run->add_option("--dt", f.dt, "simulation step")->check(CLI::PositiveNumber);
  run->add_option("--periods", f.periods, "simulated periods")->check(CLI::Range(2, 1000000));
  run->add_option("--margin", f.margin, "allowed dip below Emin, as a fraction of Emax")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--mu-preset", f.muPreset, "efficiency curve override")
      ->check(CLI::IsMember({"literal", "alternate"}));
  run->add_option("--lp-dump", f.lpDump, "write the final head-layer LP in text form");

  std::string report, svg, trace;
  double dt = 0.05, margin = 0.02;
  std::size_t periods = 3;
  CLI::App* validate = app.add_subcommand("validate", "re-simulate a report");
  validate->add_option("report,--report", report, "run report")->required();
  validate->add_option("--dt", dt, "simulation step")->check(CLI::PositiveNumber);
  validate->add_option("--periods", periods, "simulated periods")->check(CLI::Range(2, 1000000));
  validate->add_option("--margin", margin, "allowed dip below Emin, as a fraction of Emax")
      ->check(CLI::NonNegativeNumber);
  validate->add_option("--trace", trace, "battery trace CSV");

  CLI::App* render = app.add_subcommand("render", "draw a report as SVG");
  render->add_option("report,--report", report, "run report")->required();
  render->add_option("--svg,--out", svg, "output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) return cmd_run(f);
    if (*validate) return cmd_validate(report, dt, periods, margin, trace);
    if (*render) return cmd_render(report, svg);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what();
    if (!e.nodes().empty()) std::cerr << fmt::format(" [binding nodes: {}]", fmt::join(e.nodes(), ", "));
    std::cerr << "\n";
    return kInfeasible;
  } catch (const InputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
