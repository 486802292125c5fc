#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "consensus/analysis.hpp"
#include "consensus/conditions.hpp"
#include "consensus/dynamics.hpp"
#include "consensus/scenarios.hpp"
#include "consensus/schedule.hpp"

// File formats. All indices are 1-based on disk; memory stays 0-based.
namespace consensus {

using Json = nlohmann::ordered_json;

Json schedule_to_json(const ConnectionSchedule& schedule);
ConnectionSchedule schedule_from_json(const Json& j);

Json scenario_to_json(const Scenario& s);

// One CSV per coordinate axis: columns t, x_1 ... x_N.
std::string trajectory_to_csv(const Trajectory& traj, int axis);
Json trajectory_to_json(const Trajectory& traj, bool include_steps);

Json report_to_json(const ConditionReport& r);
Json certify_to_json(const CertifyReport& r);

Json diagnostics_to_json(const DiagnosticsReport& rep);
// Columns t, diameter (plus per-axis spreads when d > 1).
std::string diagnostics_to_csv(const DiagnosticsReport& rep);

// Edge-list text, one "j -> k" per line.
std::string graph_to_text(const DirectedGraph& g);

}  // namespace consensus
