#include "tlfw/report.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "tlfw/energy.hpp"
#include "tlfw/error.hpp"
#include "tlfw/json_io.hpp"

namespace tlfw {

using nlohmann::json;

namespace {

// Targets printed for the reference network, echoed beside the computed values.
constexpr double kRefPeriod = 6134.0;
constexpr double kRefObjectivePrinted = 0.71;
constexpr double kRefObjectiveFromBreakdown = 0.669;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_num(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (v.is_null()) return std::numeric_limits<double>::infinity();
  return v.get<double>();
}

json pt(Point p) { return json::array({p.x, p.y}); }

Point read_pt(const json& v) { return {v.at(0).get<double>(), v.at(1).get<double>()}; }

json tour_json(const Tour& t) {
  json w = json::array();
  for (Point p : t.waypoints) w.push_back(pt(p));
  return {{"waypoints", w}, {"order", t.order}, {"length", t.length},
          {"method", std::string(to_string(t.method))}};
}

Tour read_tour(const json& j) {
  Tour t;
  for (const json& p : j.at("waypoints")) t.waypoints.push_back(read_pt(p));
  t.order = j.at("order").get<std::vector<std::size_t>>();
  t.length = j.at("length").get<double>();
  t.method = j.at("method").get<std::string>() == "exact" ? TourMethod::Exact : TourMethod::Heuristic;
  if (t.order.size() != t.waypoints.size()) throw InputError("report: tour order and waypoints differ");
  return t;
}

json diag_json(const SolveDiagnostics& d) {
  return {{"iterations", d.iterations},
          {"rounds", d.rounds},
          {"rows", d.rows},
          {"columns", d.columns},
          {"candidate_columns", d.candidateColumns},
          {"max_violation", d.maxViolation},
          {"max_negativity", d.maxNegativity},
          {"binding_nodes", d.bindingNodes}};
}

SolveDiagnostics read_diag(const json& j) {
  SolveDiagnostics d;
  d.iterations = j.at("iterations").get<std::size_t>();
  d.rounds = j.at("rounds").get<std::size_t>();
  d.rows = j.at("rows").get<std::size_t>();
  d.columns = j.at("columns").get<std::size_t>();
  d.candidateColumns = j.at("candidate_columns").get<std::size_t>();
  d.maxViolation = j.at("max_violation").get<double>();
  d.maxNegativity = j.at("max_negativity").get<double>();
  d.bindingNodes = j.at("binding_nodes").get<std::vector<int>>();
  return d;
}

json cluster_json(const ClusterPlan& p) {
  json cells = json::array();
  for (const Cell& c : p.cells.cells)
    cells.push_back({{"q", c.hex.coord.q}, {"r", c.hex.coord.r}, {"center", pt(c.hex.center)},
                     {"members", c.memberIds}});
  json stops = json::array();
  for (double w : p.stopDurations) stops.push_back(w);
  return {{"cluster_index", p.clusterIndex},
          {"head", p.headId},
          {"degenerate", !std::isfinite(p.cycleTime)},
          {"cell_side", p.cells.side},
          {"cells", cells},
          {"tour", tour_json(p.tour)},
          {"tour_length", p.tour.length},
          {"stop_durations", stops},
          {"cycle_time", num(p.cycleTime)},
          {"vacation", num(p.vacation)},
          {"travel_time", p.travelTime},
          {"charge_time", num(p.charge_time())},
          {"rate", p.chargeFraction},
          {"logical_rate", p.logicalRate},
          {"max_cycle", num(p.maxCycle)},
          {"objective", p.objective},
          {"diagnostics", diag_json(p.diag)}};
}

ClusterPlan read_cluster(const json& j) {
  ClusterPlan p;
  p.clusterIndex = j.at("cluster_index").get<std::size_t>();
  p.headId = j.at("head").get<int>();
  p.cells.side = j.at("cell_side").get<double>();
  for (const json& c : j.at("cells"))
    p.cells.cells.push_back(Cell{HexCell{{c.at("q").get<int>(), c.at("r").get<int>()}, read_pt(c.at("center"))},
                                 c.at("members").get<std::vector<int>>()});
  p.tour = read_tour(j.at("tour"));
  p.stopDurations = j.at("stop_durations").get<std::vector<double>>();
  p.cycleTime = read_num(j, "cycle_time");
  p.vacation = std::isfinite(p.cycleTime) ? read_num(j, "vacation") : 0.0;
  p.travelTime = j.at("travel_time").get<double>();
  p.chargeFraction = j.at("rate").get<double>();
  p.logicalRate = j.at("logical_rate").get<double>();
  p.maxCycle = read_num(j, "max_cycle");
  p.objective = j.at("objective").get<double>();
  p.diag = read_diag(j.at("diagnostics"));
  return p;
}

json flows_json(const FlowPattern& f) {
  json direct = json::array(), relays = json::array();
  for (const auto& [id, rate] : f.toStation) direct.push_back(json::array({id, rate}));
  for (const Relay& r : f.relays) relays.push_back(json::array({r.from, r.to, r.rate}));
  return {{"to_station", direct}, {"relays", relays}};
}

FlowPattern read_flows(const json& j) {
  FlowPattern f;
  for (const json& d : j.at("to_station")) f.toStation[d.at(0).get<int>()] = d.at(1).get<double>();
  for (const json& r : j.at("relays"))
    f.relays.push_back({r.at(0).get<int>(), r.at(1).get<int>(), r.at(2).get<double>()});
  return f;
}

json head_json(const HeadLayerPlan& p) {
  json parts = json::array();
  for (const Participant& a : p.participants)
    parts.push_back({{"id", a.id}, {"ingress", a.ingress}, {"member_rate", a.memberRate}});
  json stops = json::array();
  for (Point s : p.stops) stops.push_back(pt(s));
  json epochs = json::array();
  for (std::size_t e = 0; e < p.epochs.size(); ++e) {
    const Epoch& ep = p.epochs[e];
    epochs.push_back({{"kind", std::string(to_string(ep.kind))},
                      {"index", ep.index},
                      {"position", pt(ep.position)},
                      {"length", ep.length},
                      {"duration", p.epochDurations[e]},
                      {"flows", flows_json(p.flows[e])}});
  }
  return {{"mode", std::string(to_string(p.mode))},
          {"charge_model", std::string(to_string(p.chargeModel))},
          {"prune_k", p.pruneK},
          {"seg_max", p.segMax},
          {"participants", parts},
          {"stops", stops},
          {"tour", tour_json(p.tour)},
          {"tour_length", p.tour.length},
          {"stop_durations", p.stopDurations},
          {"cycle_time", p.cycleTime},
          {"vacation", p.vacation},
          {"vacation_fraction", p.vacation / p.cycleTime},
          {"charge_time", p.charge_time()},
          {"travel_time", p.travelTime},
          {"objective", p.objective},
          {"epochs", epochs},
          {"diagnostics", diag_json(p.diag)}};
}

HeadLayerPlan read_head(const json& j, const NetworkParams& params) {
  HeadLayerPlan p;
  p.mode = j.at("mode").get<std::string>() == "tlfw-heads" ? HeadMode::TlfwHeads : HeadMode::MsirsnBaseline;
  p.chargeModel = j.at("charge_model").get<std::string>() == "colocation" ? ChargeModel::Colocation
                                                                          : ChargeModel::Ranged;
  p.pruneK = j.at("prune_k").get<std::size_t>();
  p.segMax = j.at("seg_max").get<double>();
  for (const json& a : j.at("participants"))
    p.participants.push_back({a.at("id").get<int>(), a.at("ingress").get<double>(),
                              a.at("member_rate").get<double>()});
  for (const json& s : j.at("stops")) p.stops.push_back(read_pt(s));
  p.tour = read_tour(j.at("tour"));
  p.stopDurations = j.at("stop_durations").get<std::vector<double>>();
  p.cycleTime = j.at("cycle_time").get<double>();
  p.vacation = j.at("vacation").get<double>();
  p.travelTime = j.at("travel_time").get<double>();
  p.objective = j.at("objective").get<double>();
  if (p.stopDurations.size() != p.stops.size())
    throw InputError("report: head plan stop durations and stops differ in count");
  for (const json& e : j.at("epochs")) {
    Epoch ep;
    const std::string kind = e.at("kind").get<std::string>();
    ep.kind = kind == "stop" ? EpochKind::Stop : kind == "move" ? EpochKind::Move : EpochKind::Vacation;
    ep.index = e.at("index").get<std::size_t>();
    ep.position = read_pt(e.at("position"));
    ep.length = e.at("length").get<double>();
    double d = 0.0;
    switch (ep.kind) {
      case EpochKind::Move:
        ep.fixedDuration = ep.length / params.speed;
        d = ep.fixedDuration;
        break;
      case EpochKind::Stop:
        if (ep.index >= p.stopDurations.size()) throw InputError("report: epoch names a missing stop");
        d = p.stopDurations[ep.index];
        break;
      case EpochKind::Vacation: d = p.vacation; break;
    }
    p.epochs.push_back(ep);
    p.epochDurations.push_back(d);
    p.flows.push_back(read_flows(e.at("flows")));
  }
  p.diag = read_diag(j.at("diagnostics"));
  return p;
}

json joint_json(const JointPlan& j) {
  return {{"period", j.period},
          {"sub_periods", j.subPeriods},
          {"sub_period_assignment", j.subPeriodAssignment},
          {"scaled_charge_times", j.scaledChargeTimes},
          {"scaled_stop_durations", j.scaledStopDurations},
          {"breakdown",
           {{"head_charge_time", j.breakdown.headChargeTime},
            {"head_travel_time", j.breakdown.headTravelTime},
            {"normal_charge_time", j.breakdown.normalChargeTime},
            {"normal_travel_time", j.breakdown.normalTravelTime}}},
          {"vacation", j.vacation},
          {"objective", j.objective},
          {"cycle_bound", num(j.cycleBound)},
          {"budget_bound", num(j.budgetBound)},
          {"reference_targets",
           {{"period", kRefPeriod},
            {"objective_printed", kRefObjectivePrinted},
            {"objective_from_printed_breakdown", kRefObjectiveFromBreakdown}}}};
}

JointPlan read_joint(const json& j, std::span<const ClusterPlan> clusters) {
  JointPlan out;
  out.period = j.at("period").get<double>();
  out.subPeriods = j.at("sub_periods").get<double>();
  out.subPeriodAssignment = j.at("sub_period_assignment").get<std::vector<std::size_t>>();
  out.scaledChargeTimes = j.at("scaled_charge_times").get<std::vector<double>>();
  const json& b = j.at("breakdown");
  out.breakdown = {b.at("head_charge_time").get<double>(), b.at("head_travel_time").get<double>(),
                   b.at("normal_charge_time").get<double>(), b.at("normal_travel_time").get<double>()};
  out.vacation = j.at("vacation").get<double>();
  out.objective = j.at("objective").get<double>();
  out.cycleBound = read_num(j, "cycle_bound");
  out.budgetBound = read_num(j, "budget_bound");
  for (const ClusterPlan& c : clusters) {
    const double scale = std::isfinite(c.cycleTime) ? out.period / c.cycleTime : 0.0;
    std::vector<double> s;
    for (double w : c.stopDurations) s.push_back(w * scale);
    out.scaledStopDurations.push_back(std::move(s));
  }
  return out;
}

json settings_json(const RunSettings& s, const NetworkParams& p) {
  return {{"mode", s.mode == HeadMode::TlfwHeads ? "tlfw" : "msirsn"},
          {"clusters", s.clusters},
          {"seed", s.seed},
          {"restarts", s.restarts},
          {"variant", std::string(to_string(s.variant))},
          {"seg_max", s.segMax},
          {"prune_k", s.prune_k()},
          {"jobs", s.jobs},
          {"simulate", s.simulate},
          {"dt", s.dt},
          {"periods", s.periods},
          {"margin_frac", s.marginFrac},
          {"mu_coeffs", p.muCoeffs},
          {"source", s.source}};
}

RunSettings read_settings(const json& j) {
  RunSettings s;
  s.mode = j.at("mode").get<std::string>() == "msirsn" ? HeadMode::MsirsnBaseline : HeadMode::TlfwHeads;
  s.clusters = j.at("clusters").get<std::size_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.restarts = j.at("restarts").get<std::size_t>();
  s.variant = head_update_from_string(j.at("variant").get<std::string>());
  s.segMax = j.at("seg_max").get<double>();
  s.pruneK = j.at("prune_k").get<std::size_t>();
  s.jobs = j.at("jobs").get<std::size_t>();
  s.simulate = j.at("simulate").get<bool>();
  s.dt = j.at("dt").get<double>();
  s.periods = j.at("periods").get<std::size_t>();
  s.marginFrac = j.at("margin_frac").get<double>();
  s.source = j.at("source").get<std::string>();
  return s;
}

json verdict_json(const SimulationSummary& s) {
  const RenewVerdict& v = s.verdict;
  json failures = json::array();
  for (const RenewFailure& f : v.failures)
    failures.push_back({{"kind", f.kind == RenewFailure::Kind::BelowMin ? "below_min" : "declining"},
                        {"node", f.nodeId},
                        {"period", f.period},
                        {"time", f.time},
                        {"value", f.value}});
  return {{"dt", s.dt},
          {"periods", s.periods},
          {"margin_frac", v.marginFrac},
          {"pass", v.pass},
          {"threshold", v.threshold},
          {"min_energy", v.minEnergy},
          {"min_node", v.minNode},
          {"min_time", v.minTime},
          {"failures", failures},
          {"detour_flow_pattern", "vacation"}};
}

}  // namespace

json report_to_json(const RunResult& r, const std::string& timestamp) {
  const NetworkParams& p = r.scenario.params();
  json doc;
  doc["format"] = kReportFormat;
  if (!timestamp.empty()) doc["timestamp"] = timestamp;
  doc["settings"] = settings_json(r.settings, p);
  const json scen = scenario_to_json(r.scenario);
  doc["scenario_digest"] = {{"node_count", r.scenario.size()},
                            {"total_rate", r.scenario.total_rate()},
                            {"params", scen.at("params")},
                            {"station", scen.at("station")}};
  doc["scenario"] = scen;
  if (r.clustering) {
    json clusters = json::array();
    for (const Cluster& c : r.clustering->clusters)
      clusters.push_back({{"head", c.headId}, {"members", c.memberIds}});
    doc["clustering"] = {{"heads", r.clustering->heads()},
                         {"clusters", clusters},
                         {"comm_cost", r.commCost},
                         {"sensor_layer_energy", sensor_layer_energy(r.scenario, *r.clustering)}};
  }
  if (!r.clusterPlans.empty()) {
    json plans = json::array();
    for (const ClusterPlan& c : r.clusterPlans) plans.push_back(cluster_json(c));
    doc["cluster_plans"] = plans;
  }
  if (r.headPlan) doc["head_plan"] = head_json(*r.headPlan);
  if (r.joint) doc["joint"] = joint_json(*r.joint);
  if (r.baseline) doc["baseline"] = head_json(*r.baseline);
  if (r.simulation) doc["simulation"] = verdict_json(*r.simulation);
  return doc;
}

RunResult result_from_json(const json& doc) {
  try {
    if (!doc.is_object() || doc.value("format", "") != kReportFormat)
      throw InputError(fmt::format("not a run report (expected format '{}')", kReportFormat));
    RunResult r{scenario_from_json(doc.at("scenario")), read_settings(doc.at("settings"))};
    const NetworkParams& p = r.scenario.params();
    if (doc.contains("clustering")) {
      Clustering c;
      for (const json& cl : doc.at("clustering").at("clusters"))
        c.clusters.push_back({cl.at("head").get<int>(), cl.at("members").get<std::vector<int>>()});
      validate_clustering(r.scenario, c);
      r.clustering = c;
      r.commCost = doc.at("clustering").at("comm_cost").get<double>();
    }
    if (doc.contains("cluster_plans"))
      for (const json& c : doc.at("cluster_plans")) r.clusterPlans.push_back(read_cluster(c));
    if (doc.contains("head_plan")) r.headPlan = read_head(doc.at("head_plan"), p);
    if (doc.contains("joint")) r.joint = read_joint(doc.at("joint"), r.clusterPlans);
    if (doc.contains("baseline")) r.baseline = read_head(doc.at("baseline"), p);
    return r;
  } catch (const json::exception& e) {
    throw InputError(fmt::format("malformed report: {}", e.what()));
  }
}

namespace {

constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                               "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

class Canvas {
 public:
  explicit Canvas(const Area& area) : area_(area) {
    scale_ = kPlot / std::max(area.width, area.height);
  }

  double px(double v) const { return kPad + v * scale_; }
  double py(double v) const { return kPad + (area_.height - v) * scale_; }
  std::string x(double v) const { return fmt::format("{:.2f}", px(v)); }
  std::string y(double v) const { return fmt::format("{:.2f}", py(v)); }

  std::string points(const std::vector<Point>& ps, bool closed) const {
    std::string s;
    for (Point p : ps) s += x(p.x) + "," + y(p.y) + " ";
    if (closed && !ps.empty()) s += x(ps.front().x) + "," + y(ps.front().y);
    return s;
  }

  std::string star(Point c, double r, const char* fill, const char* cls) const {
    std::vector<Point> pts;
    const double cx = px(c.x), cy = py(c.y);
    for (int k = 0; k < 10; ++k) {
      const double a = -std::numbers::pi / 2 + k * std::numbers::pi / 5;
      const double rr = k % 2 == 0 ? r : r * 0.45;
      pts.push_back({cx + rr * std::cos(a), cy + rr * std::sin(a)});
    }
    std::string s;
    for (Point p : pts) s += fmt::format("{:.2f},{:.2f} ", p.x, p.y);
    return fmt::format("<polygon class=\"{}\" points=\"{}\" fill=\"{}\" stroke=\"black\" stroke-width=\"0.6\"/>\n",
                       cls, s, fill);
  }

  double width() const { return kPad * 2 + area_.width * scale_ + kLegend; }
  double height() const { return kPad * 2 + area_.height * scale_; }
  double legend_x() const { return kPad * 2 + area_.width * scale_; }

 private:
  static constexpr double kPlot = 560.0;
  static constexpr double kPad = 20.0;
  static constexpr double kLegend = 190.0;
  Area area_;
  double scale_ = 1.0;
};

}  // namespace

std::string render_svg(const RunResult& r) {
  const Canvas cv(r.scenario.area());
  std::ostringstream s;
  s << fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
      "viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      cv.width(), cv.height());
  const Area& area = r.scenario.area();
  s << fmt::format(
      "<rect class=\"area\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"white\" stroke=\"#444\"/>\n",
      cv.px(0), cv.py(area.height), cv.px(area.width) - cv.px(0), cv.py(0) - cv.py(area.height));

  std::map<int, std::size_t> colorOf;
  if (r.clustering)
    for (std::size_t i = 0; i < r.clustering->m(); ++i) {
      colorOf[r.clustering->clusters[i].headId] = i;
      for (int t : r.clustering->clusters[i].memberIds) colorOf[t] = i;
    }

  auto polyline = [&](const Tour& t, const char* cls, const char* color, double w, const char* dash) {
    s << fmt::format("<polyline class=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"{}/>\n",
                     cls, cv.points(t.waypoints, true), color, w,
                     dash[0] ? fmt::format(" stroke-dasharray=\"{}\"", dash) : std::string());
  };

  for (const ClusterPlan& c : r.clusterPlans)
    if (c.tour.waypoints.size() > 1)
      polyline(c.tour, "cluster-tour", kPalette[c.clusterIndex % kPalette.size()], 1.0, "4 2");
  if (r.headPlan) polyline(r.headPlan->tour, "head-tour", "black", 1.6, "");
  if (r.baseline) polyline(r.baseline->tour, "baseline-tour", "black", 1.4, "");

  for (const ClusterPlan& c : r.clusterPlans)
    for (const Cell& cell : c.cells.cells)
      s << fmt::format("<ellipse class=\"cell-stop\" cx=\"{}\" cy=\"{}\" rx=\"5\" ry=\"3\" fill=\"gold\" stroke=\"#886600\" stroke-width=\"0.5\"/>\n",
                       cv.x(cell.hex.center.x), cv.y(cell.hex.center.y));
  if (r.baseline)
    for (Point p : r.baseline->stops) s << cv.star(p, 7, "gold", "stop");

  std::set<int> heads;
  if (r.clustering)
    for (int h : r.clustering->heads()) heads.insert(h);
  for (const SensorNode& n : r.scenario.nodes()) {
    if (heads.count(n.id)) continue;
    const char* color = colorOf.count(n.id) ? kPalette[colorOf[n.id] % kPalette.size()] : "#1f77b4";
    s << fmt::format("<circle class=\"node\" data-id=\"{}\" cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"{}\"/>\n", n.id,
                     cv.x(n.pos.x), cv.y(n.pos.y), color);
  }
  for (int h : heads) s << cv.star(r.scenario.node(h).pos, 8, "limegreen", "head");

  const Point st = r.scenario.params().station;
  s << fmt::format("<rect class=\"station\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"9\" height=\"9\" fill=\"black\"/>\n",
                   cv.px(st.x) - 4.5, cv.py(st.y) - 4.5);

  // Legend.
  double ly = 30;
  const double lx = cv.legend_x();
  s << "<g class=\"legend\">\n";
  auto entry = [&](const std::string& swatch, const std::string& label) {
    s << swatch << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", lx + 22, ly + 4, label);
    ly += 20;
  };
  if (r.clustering) {
    for (std::size_t i = 0; i < r.clustering->m(); ++i)
      entry(fmt::format("<circle class=\"legend-cluster\" cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"4\" fill=\"{}\"/>", lx + 8, ly,
                        kPalette[i % kPalette.size()]),
            fmt::format("cluster of head {}", r.clustering->clusters[i].headId));
  } else {
    entry(fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"4\" fill=\"#1f77b4\"/>", lx + 8, ly), "sensor node");
  }
  if (!heads.empty())
    entry(fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"5\" fill=\"limegreen\"/>", lx + 8, ly), "cluster head");
  if (!r.clusterPlans.empty())
    entry(fmt::format("<ellipse cx=\"{:.1f}\" cy=\"{:.1f}\" rx=\"5\" ry=\"3\" fill=\"gold\"/>", lx + 8, ly),
          "cell center stop");
  if (r.baseline)
    entry(fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"5\" fill=\"gold\"/>", lx + 8, ly), "stopping point");
  if (r.headPlan || r.baseline)
    entry(fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"black\" stroke-width=\"1.6\"/>",
                      lx, ly, lx + 16, ly),
          r.headPlan ? "head tour" : "vehicle tour");
  if (!r.clusterPlans.empty())
    entry(fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#555\" stroke-dasharray=\"4 2\"/>",
                      lx, ly, lx + 16, ly),
          "cluster tour");
  entry(fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"9\" height=\"9\" fill=\"black\"/>", lx + 3.5, ly - 4.5),
        "service station");
  s << "</g>\n</svg>\n";
  return s.str();
}

}  // namespace tlfw
