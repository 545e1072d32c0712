#pragma once

#include <string>

#include <json.hpp>

#include "tlfw/pipeline.hpp"

namespace tlfw {

inline constexpr const char* kReportFormat = "tlfw-run-report/1";

/// The run report. `timestamp` is the only field that differs between identical runs;
/// pass an empty string to omit it.
nlohmann::json report_to_json(const RunResult& result, const std::string& timestamp = {});

/// Rebuilds the plans of a report. Epoch durations are recomputed from the stored
/// stop durations, and the joint stop durations from the cluster plans, so edits to
/// those values take effect on re-simulation.
RunResult result_from_json(const nlohmann::json& report);

/// SVG drawing of the network, tours and stops in the unit viewport.
std::string render_svg(const RunResult& result);

}  // namespace tlfw
