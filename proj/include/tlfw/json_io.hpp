#pragma once

#include <json.hpp>

#include "tlfw/scenario.hpp"

namespace tlfw {

nlohmann::json scenario_to_json(const Scenario& scenario);
/// Strict: unknown fields and wrongly typed values raise InputError naming the field.
Scenario scenario_from_json(const nlohmann::json& doc);

}  // namespace tlfw
