#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "accsim/fitlimits.hpp"
#include "accsim/safety.hpp"
#include "accsim/sim.hpp"

namespace accsim::io {

using nlohmann::json;

/// Header of trajectories.csv, fixed.
inline constexpr const char* kTrajectoryHeader = "t,vehicle,x,v,a,v_target,v_pid,spacing";

/// Builds a validated scenario from a JSON document. Omitted fields take the
/// documented defaults; `defaults` seeds every follower, `vehicles[i]`
/// overrides follower i+1 and `mixed` samples followers from `rng_seed`.
/// Throws ValidationError naming the offending field.
Scenario scenario_from_json(const json& doc);

/// Fully expanded document; scenario_from_json(scenario_to_json(s)) == s.
json scenario_to_json(const Scenario& s);

Scenario parse_scenario(const std::filesystem::path& path);

/// Reads a JSON file, reporting syntax errors as ValidationError.
json read_json(const std::filesystem::path& path);

json vehicle_to_json(const VehicleConfig& v);
VehicleConfig vehicle_from_json(const json& j, VehicleConfig base, const std::string& where);
LeadProfiled lead_from_json(const json& j);
json lead_to_json(const LeadProfiled& p);
AccParamsd acc_from_json(const json& j, AccParamsd base, const std::string& where);
LimitModeld limits_from_json(const json& j, LimitModeld base, const std::string& where);

/// Locale-independent fixed-point formatting with 6 decimals.
std::string fixed6(double x);

void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log);

/// Exactly {queue_length, congestion_duration_s, peak_deviation_mps, min_spacing_m, crashes}.
json metrics_to_json(const MetricsReport& m);
json safety_to_json(const SafetyReport& r);

/// Time-space and speed panels.
std::string render_svg(const TrajectoryLog& log);

struct OutputOptions {
  bool plot{false};
};

/// Writes trajectories.csv, metrics.json, reports.json and optionally
/// plot.svg into out_dir (created if missing). Returns the written paths.
std::vector<std::filesystem::path> write_outputs(const TrajectoryLog& log, const MetricsReport& metrics,
                                                 const json& reports, const std::filesystem::path& out_dir,
                                                 const OutputOptions& opts = {});

/// Parses trajectories.csv and returns one drive per vehicle, in vehicle order.
std::vector<Drive> read_trajectory_drives(const std::filesystem::path& path);

}  // namespace accsim::io
