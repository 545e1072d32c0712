#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tlfw/geometry.hpp"

namespace tlfw {

struct SensorNode {
  int id = 0;
  Point pos;
  /// Data generation rate in bits per unit time.
  double rate = 0.0;

  friend bool operator==(const SensorNode&, const SensorNode&) = default;
};

namespace mu_presets {
/// 1 - 44 D^2, the default efficiency curve.
inline const std::vector<double> kLiteral{1.0, 0.0, -44.0};
/// 1 - 4 D^2 - 40 D^4.
inline const std::vector<double> kAlternate{1.0, 0.0, -4.0, 0.0, -40.0};
}  // namespace mu_presets

struct NetworkParams {
  double beta1 = 1.0;
  double beta2 = 1.0;
  double pathLossExp = 4.0;
  double rho = 1.0;
  double alpha = 0.0;
  double speed = 0.1;
  double eMax = 10000.0;
  double eMin = 500.0;
  double uMax = 50.0;
  double dDelta = 0.1;
  /// Charging-efficiency polynomial, lowest degree first.
  std::vector<double> muCoeffs = mu_presets::kLiteral;
  Point station{0.5, 0.5};

  /// Evaluates the efficiency polynomial at distance d (no range cut-off).
  double efficiency(double d) const;

  /// Throws InputError naming the offending field.
  void validate() const;

  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

struct Area {
  double width = 1.0;
  double height = 1.0;

  friend bool operator==(const Area&, const Area&) = default;
};

struct RateRange {
  double lo = 0.1;
  double hi = 1.0;
};

/// Immutable network description. Construction validates every invariant.
class Scenario {
 public:
  Scenario(Area area, std::vector<SensorNode> nodes, NetworkParams params);

  const Area& area() const { return area_; }
  const std::vector<SensorNode>& nodes() const { return nodes_; }
  const NetworkParams& params() const { return params_; }
  std::size_t size() const { return nodes_.size(); }

  bool contains(int id) const { return index_.count(id) != 0; }
  /// Position of the node in nodes(); throws InputError for unknown ids.
  std::size_t index_of(int id) const;
  const SensorNode& node(int id) const { return nodes_[index_of(id)]; }

  double total_rate() const;

  friend bool operator==(const Scenario& a, const Scenario& b) {
    return a.area_ == b.area_ && a.nodes_ == b.nodes_ && a.params_ == b.params_;
  }

 private:
  Area area_;
  std::vector<SensorNode> nodes_;
  NetworkParams params_;
  std::unordered_map<int, std::size_t> index_;
};

/// The built-in 50-node reference network with default parameters.
Scenario load_builtin_table1();

/// Parses a scenario document (see README for the format).
Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::string& path);
std::string serialize_scenario(const Scenario& scenario);

Scenario generate_scenario(std::uint64_t seed, std::size_t n, Area area = {},
                           RateRange rates = {});

}  // namespace tlfw
