#include "tlfw/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <utility>

#include <fmt/format.h>

#include "tlfw/error.hpp"
#include "tlfw/json_io.hpp"
#include "tlfw/random.hpp"

namespace tlfw {

namespace {

constexpr int kMuGridPoints = 1000;
constexpr double kMuTol = 1e-12;

void require(bool ok, std::string_view field, std::string_view msg) {
  if (!ok) throw InputError(fmt::format("field '{}': {}", field, msg));
}

}  // namespace

double NetworkParams::efficiency(double d) const {
  double acc = 0.0;
  for (auto it = muCoeffs.rbegin(); it != muCoeffs.rend(); ++it) acc = acc * d + *it;
  return acc;
}

void NetworkParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  require(finite(beta1) && beta1 >= 0.0, "params.beta1", "must be finite and >= 0");
  require(finite(beta2) && beta2 >= 0.0, "params.beta2", "must be finite and >= 0");
  require(finite(pathLossExp) && pathLossExp >= 2.0 && pathLossExp <= 4.0, "params.omega",
          "path loss exponent must lie in [2, 4]");
  require(finite(rho) && rho >= 0.0, "params.rho", "must be finite and >= 0");
  require(finite(alpha) && alpha >= 0.0, "params.alpha", "must be finite and >= 0");
  require(finite(speed) && speed > 0.0, "params.V", "vehicle speed must be > 0");
  require(finite(eMin) && eMin >= 0.0, "params.Emin", "must be finite and >= 0");
  require(finite(eMax) && eMax > eMin, "params.Emax", "must exceed Emin");
  require(finite(uMax) && uMax > 0.0, "params.Umax", "must be > 0");
  require(finite(dDelta) && dDelta > 0.0, "params.Ddelta", "charging range must be > 0");
  require(!muCoeffs.empty(), "params.mu", "needs at least one coefficient");
  for (double c : muCoeffs) require(finite(c), "params.mu", "coefficients must be finite");
  require(finite(station.x) && finite(station.y), "station", "coordinates must be finite");

  // Efficiency is only meaningful inside the charging range.
  double prev = efficiency(0.0);
  for (int k = 0; k < kMuGridPoints; ++k) {
    const double d = dDelta * k / (kMuGridPoints - 1);
    const double mu = efficiency(d);
    require(mu >= -kMuTol && mu <= 1.0 + kMuTol, "params.mu",
            fmt::format("efficiency {} at distance {} leaves [0, 1]", mu, d));
    require(mu <= prev + kMuTol, "params.mu",
            fmt::format("efficiency increases near distance {}", d));
    prev = mu;
  }
}

Scenario::Scenario(Area area, std::vector<SensorNode> nodes, NetworkParams params)
    : area_(area), nodes_(std::move(nodes)), params_(std::move(params)) {
  require(std::isfinite(area_.width) && area_.width > 0.0, "area", "width must be > 0");
  require(std::isfinite(area_.height) && area_.height > 0.0, "area", "height must be > 0");
  params_.validate();
  require(!nodes_.empty(), "nodes", "at least one node is required");

  std::set<std::pair<double, double>> coords;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const SensorNode& n = nodes_[i];
    const std::string field = fmt::format("nodes[{}]", i);
    require(n.id > 0, field + ".id", "must be a positive integer");
    require(index_.emplace(n.id, i).second, field + ".id", fmt::format("duplicate id {}", n.id));
    require(std::isfinite(n.rate) && n.rate >= 0.0, field + ".r", "rate must be finite and >= 0");
    require(std::isfinite(n.pos.x) && n.pos.x >= 0.0 && n.pos.x <= area_.width, field + ".x",
            "outside the area");
    require(std::isfinite(n.pos.y) && n.pos.y >= 0.0 && n.pos.y <= area_.height, field + ".y",
            "outside the area");
    require(coords.emplace(n.pos.x, n.pos.y).second, field,
            fmt::format("node {} duplicates another node's coordinates", n.id));
  }
}

std::size_t Scenario::index_of(int id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw InputError(fmt::format("unknown node id {}", id));
  return it->second;
}

double Scenario::total_rate() const {
  double s = 0.0;
  for (const auto& n : nodes_) s += n.rate;
  return s;
}

Scenario load_builtin_table1() {
  std::vector<SensorNode> nodes{
      {1, {0.547, 0.644}, 0.1},  {2, {0.662, 0.757}, 0.7},  {3, {0.037, 0.859}, 0.4},
      {4, {0.723, 0.741}, 1.0},  {5, {0.529, 0.778}, 0.9},  {6, {0.316, 0.035}, 0.4},
      {7, {0.190, 0.842}, 0.8},  {8, {0.288, 0.106}, 0.8},  {9, {0.040, 0.942}, 0.2},
      {10, {0.264, 0.648}, 0.4}, {11, {0.446, 0.805}, 0.5}, {12, {0.890, 0.729}, 0.5},
      {13, {0.370, 0.350}, 0.1}, {14, {0.006, 0.101}, 0.7}, {15, {0.393, 0.548}, 0.1},
      {16, {0.629, 0.623}, 0.1}, {17, {0.084, 0.954}, 0.5}, {18, {0.756, 0.840}, 0.2},
      {19, {0.966, 0.376}, 0.7}, {20, {0.931, 0.308}, 0.6}, {21, {0.944, 0.439}, 0.1},
      {22, {0.626, 0.323}, 0.4}, {23, {0.537, 0.538}, 0.2}, {24, {0.118, 0.082}, 0.3},
      {25, {0.929, 0.541}, 0.2}, {26, {0.833, 0.115}, 0.2}, {27, {0.639, 0.658}, 0.1},
      {28, {0.704, 0.930}, 0.6}, {29, {0.977, 0.306}, 0.8}, {30, {0.673, 0.386}, 0.5},
      {31, {0.021, 0.745}, 0.7}, {32, {0.924, 0.072}, 0.6}, {33, {0.270, 0.829}, 0.1},
      {34, {0.777, 0.573}, 0.8}, {35, {0.097, 0.512}, 0.9}, {36, {0.986, 0.290}, 0.2},
      {37, {0.161, 0.636}, 0.7}, {38, {0.355, 0.767}, 0.9}, {39, {0.655, 0.574}, 0.5},
      {40, {0.031, 0.052}, 0.4}, {41, {0.350, 0.150}, 0.3}, {42, {0.941, 0.724}, 0.1},
      {43, {0.966, 0.430}, 0.2}, {44, {0.107, 0.191}, 0.3}, {45, {0.007, 0.337}, 0.3},
      {46, {0.457, 0.287}, 0.4}, {47, {0.753, 0.383}, 0.1}, {48, {0.945, 0.909}, 0.1},
      {49, {0.209, 0.758}, 0.3}, {50, {0.221, 0.588}, 0.8},
  };
  return Scenario(Area{1.0, 1.0}, std::move(nodes), NetworkParams{});
}

// ---------------------------------------------------------------------------
// JSON document format

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::string_view where,
                    std::initializer_list<std::string_view> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw InputError(fmt::format("field '{}{}': unknown field", where, it.key()));
  }
}

double number(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(fmt::format("field '{}': missing", path));
  if (!it->is_number()) throw InputError(fmt::format("field '{}': expected a number", path));
  return it->get<double>();
}

Point pair_of(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw InputError(fmt::format("field '{}': expected [number, number]", path));
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

json scenario_to_json(const Scenario& s) {
  const NetworkParams& p = s.params();
  json nodes = json::array();
  for (const auto& n : s.nodes())
    nodes.push_back({{"id", n.id}, {"x", n.pos.x}, {"y", n.pos.y}, {"r", n.rate}});
  return json{{"area", {s.area().width, s.area().height}},
              {"station", {p.station.x, p.station.y}},
              {"params",
               {{"beta1", p.beta1},
                {"beta2", p.beta2},
                {"omega", p.pathLossExp},
                {"rho", p.rho},
                {"alpha", p.alpha},
                {"V", p.speed},
                {"Emax", p.eMax},
                {"Emin", p.eMin},
                {"Umax", p.uMax},
                {"Ddelta", p.dDelta},
                {"mu", p.muCoeffs}}},
              {"nodes", nodes}};
}

Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) throw InputError("scenario document must be a JSON object");
  reject_unknown(doc, "", {"area", "station", "params", "nodes"});
  for (const char* key : {"area", "station", "params", "nodes"})
    if (!doc.contains(key)) throw InputError(fmt::format("field '{}': missing", key));

  const Point areaPair = pair_of(doc["area"], "area");
  NetworkParams p;
  p.station = pair_of(doc["station"], "station");

  const json& jp = doc["params"];
  if (!jp.is_object()) throw InputError("field 'params': expected an object");
  reject_unknown(jp, "params.",
                 {"beta1", "beta2", "omega", "rho", "alpha", "V", "Emax", "Emin", "Umax", "Ddelta",
                  "mu"});
  p.beta1 = number(jp, "beta1", "params.beta1");
  p.beta2 = number(jp, "beta2", "params.beta2");
  p.pathLossExp = number(jp, "omega", "params.omega");
  p.rho = number(jp, "rho", "params.rho");
  p.alpha = number(jp, "alpha", "params.alpha");
  p.speed = number(jp, "V", "params.V");
  p.eMax = number(jp, "Emax", "params.Emax");
  p.eMin = number(jp, "Emin", "params.Emin");
  p.uMax = number(jp, "Umax", "params.Umax");
  p.dDelta = number(jp, "Ddelta", "params.Ddelta");
  if (!jp.contains("mu") || !jp["mu"].is_array())
    throw InputError("field 'params.mu': expected an array of numbers");
  p.muCoeffs.clear();
  for (std::size_t k = 0; k < jp["mu"].size(); ++k) {
    if (!jp["mu"][k].is_number())
      throw InputError(fmt::format("field 'params.mu[{}]': expected a number", k));
    p.muCoeffs.push_back(jp["mu"][k].get<double>());
  }

  const json& jn = doc["nodes"];
  if (!jn.is_array()) throw InputError("field 'nodes': expected an array");
  std::vector<SensorNode> nodes;
  for (std::size_t i = 0; i < jn.size(); ++i) {
    const std::string path = fmt::format("nodes[{}]", i);
    const json& n = jn[i];
    if (!n.is_object()) throw InputError(fmt::format("field '{}': expected an object", path));
    reject_unknown(n, path + ".", {"id", "x", "y", "r"});
    if (!n.contains("id") || !n["id"].is_number_integer())
      throw InputError(fmt::format("field '{}.id': expected an integer", path));
    nodes.push_back({n["id"].get<int>(),
                     {number(n, "x", path + ".x"), number(n, "y", path + ".y")},
                     number(n, "r", path + ".r")});
  }
  return Scenario(Area{areaPair.x, areaPair.y}, std::move(nodes), std::move(p));
}

Scenario load_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line/column pair.
    std::size_t line = 1, col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t k = 0; k < upto; ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(fmt::format("parse error at line {}, column {}: {}", line, col, e.what()));
  }
  return scenario_from_json(doc);
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open scenario file '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& scenario) {
  return scenario_to_json(scenario).dump(2) + "\n";
}

Scenario generate_scenario(std::uint64_t seed, std::size_t n, Area area, RateRange rates) {
  if (n == 0) throw InputError("generate_scenario: node count must be >= 1");
  if (!(rates.lo >= 0.0) || !(rates.hi >= rates.lo) || !std::isfinite(rates.hi))
    throw InputError("generate_scenario: rate range must satisfy 0 <= lo <= hi < inf");
  std::mt19937_64 rng(derive_seed(seed, "scenario"));
  std::vector<SensorNode> nodes;
  nodes.reserve(n);
  std::set<std::pair<double, double>> seen;
  while (nodes.size() < n) {
    const Point pos{uniform(rng, 0.0, area.width), uniform(rng, 0.0, area.height)};
    const double rate = uniform(rng, rates.lo, rates.hi);
    if (!seen.emplace(pos.x, pos.y).second) continue;
    nodes.push_back({static_cast<int>(nodes.size()) + 1, pos, rate});
  }
  return Scenario(area, std::move(nodes), NetworkParams{});
}

}  // namespace tlfw
