#include "accsim/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <system_error>

namespace accsim::io {
namespace {

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

void check_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where.empty() ? "document" : where, "expected a JSON object");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  check_object(j, where);
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ValidationError(join(where, key), "unknown field");
  }
}

double number(const json& j, const char* key, double fallback, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw ValidationError(join(where, key), "expected a number");
  const double x = it->get<double>();
  if (!std::isfinite(x)) throw ValidationError(join(where, key), "must be finite");
  return x;
}

std::uint64_t unsigned_int(const json& j, const char* key, std::uint64_t fallback, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0))
    throw ValidationError(join(where, key), "expected a non-negative integer");
  return it->get<std::uint64_t>();
}

const char* kind_name(LeadKind k) {
  switch (k) {
    case LeadKind::constant: return "constant";
    case LeadKind::sine_sum: return "sine_sum";
    case LeadKind::ramp: return "ramp";
    case LeadKind::emergency_brake: return "emergency_brake";
    case LeadKind::stop_at_light: return "stop_at_light";
  }
  return "constant";
}

LeadKind kind_from(const std::string& s) {
  for (auto k : {LeadKind::constant, LeadKind::sine_sum, LeadKind::ramp, LeadKind::emergency_brake,
                 LeadKind::stop_at_light})
    if (s == kind_name(k)) return k;
  throw ValidationError("lead.kind", "unknown kind '" + s + "'");
}

Range range_from(const json& j, const char* key, Range fallback, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number())
    throw ValidationError(join(where, key), "expected [lo, hi]");
  return {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

MixedRanges mixed_from_json(const json& j, const VehicleConfig& base) {
  check_keys(j, {"ranges"}, "mixed");
  MixedRanges r;
  r.base = base;
  if (j.contains("ranges")) {
    const json& rj = j.at("ranges");
    check_keys(rj, {"k_v", "tau", "a0", "beta", "d0", "theta"}, "mixed.ranges");
    r.k_v = range_from(rj, "k_v", r.k_v, "mixed.ranges");
    r.tau = range_from(rj, "tau", r.tau, "mixed.ranges");
    r.a0 = range_from(rj, "a0", r.a0, "mixed.ranges");
    r.beta = range_from(rj, "beta", r.beta, "mixed.ranges");
    r.d0 = range_from(rj, "d0", r.d0, "mixed.ranges");
    r.theta = range_from(rj, "theta", r.theta, "mixed.ranges");
  }
  return r;
}

}  // namespace

AccParamsd acc_from_json(const json& j, AccParamsd base, const std::string& where) {
  base.k_v = number(j, "k_v", base.k_v, where);
  base.tau = number(j, "tau", base.tau, where);
  base.delta = number(j, "delta", base.delta, where);
  base.v_set = number(j, "v_set", base.v_set, where);
  if (const auto it = j.find("gain_schedule"); it != j.end()) {
    if (!it->is_array()) throw ValidationError(join(where, "gain_schedule"), "expected an array");
    base.schedule.clear();
    for (const auto& row : *it) {
      const auto w = join(where, "gain_schedule");
      check_keys(row, {"v_from", "k"}, w);
      base.schedule.push_back({number(row, "v_from", 0.0, w), number(row, "k", 0.0, w)});
    }
  }
  try {
    base.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(join(where, e.field()), e.reason());
  }
  return base;
}

LimitModeld limits_from_json(const json& j, LimitModeld base, const std::string& where) {
  check_keys(j, {"a0", "beta", "v_c", "d0", "theta"}, where);
  base.a0 = number(j, "a0", base.a0, where);
  base.beta = number(j, "beta", base.beta, where);
  base.v_c = number(j, "v_c", base.v_c, where);
  base.d0 = number(j, "d0", base.d0, where);
  base.theta = number(j, "theta", base.theta, where);
  try {
    base.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(join(where, e.field()), e.reason());
  }
  return base;
}

VehicleConfig vehicle_from_json(const json& j, VehicleConfig base, const std::string& where) {
  check_keys(j, {"k_v", "tau", "delta", "v_set", "gain_schedule", "limits", "pi", "actuation"}, where);
  base.acc = acc_from_json(j, base.acc, where);
  if (const auto it = j.find("limits"); it != j.end()) {
    if (it->is_null())
      base.limits.reset();
    else
      base.limits = limits_from_json(*it, base.limits.value_or(LimitModeld{}), join(where, "limits"));
  }
  if (const auto it = j.find("pi"); it != j.end()) {
    const auto w = join(where, "pi");
    check_keys(*it, {"kp", "ki", "i_cap"}, w);
    base.pi.kp = number(*it, "kp", base.pi.kp, w);
    base.pi.ki = number(*it, "ki", base.pi.ki, w);
    base.pi.i_cap = number(*it, "i_cap", base.pi.i_cap, w);
    try {
      base.pi.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(join(w, e.field()), e.reason());
    }
  }
  if (const auto it = j.find("actuation"); it != j.end()) {
    if (*it == "pi")
      base.actuation = Actuation::pi;
    else if (*it == "ideal")
      base.actuation = Actuation::ideal;
    else
      throw ValidationError(join(where, "actuation"), "expected \"pi\" or \"ideal\"");
  }
  return base;
}

json vehicle_to_json(const VehicleConfig& v) {
  json j;
  j["k_v"] = v.acc.k_v;
  j["tau"] = v.acc.tau;
  j["delta"] = v.acc.delta;
  j["v_set"] = v.acc.v_set;
  j["gain_schedule"] = json::array();
  for (const auto& s : v.acc.schedule) j["gain_schedule"].push_back({{"v_from", s.v_from}, {"k", s.k}});
  if (v.limits)
    j["limits"] = {{"a0", v.limits->a0},
                   {"beta", v.limits->beta},
                   {"v_c", v.limits->v_c},
                   {"d0", v.limits->d0},
                   {"theta", v.limits->theta}};
  else
    j["limits"] = nullptr;
  j["pi"] = {{"kp", v.pi.kp}, {"ki", v.pi.ki}, {"i_cap", v.pi.i_cap}};
  j["actuation"] = v.actuation == Actuation::pi ? "pi" : "ideal";
  return j;
}

LeadProfiled lead_from_json(const json& j) {
  const std::string w = "lead";
  check_keys(j, {"kind", "v0", "v_final", "a_lead", "t_start", "t_end", "components"}, w);
  LeadProfiled p;
  if (const auto it = j.find("kind"); it != j.end()) {
    if (!it->is_string()) throw ValidationError("lead.kind", "expected a string");
    p.kind = kind_from(it->get<std::string>());
  }
  p.v0 = number(j, "v0", p.v0, w);
  double v_final_default = p.v0;
  double a_default = 3.0;
  if (p.kind == LeadKind::emergency_brake) {
    v_final_default = 0.5 * p.v0;
    a_default = -5.0;
  } else if (p.kind == LeadKind::stop_at_light) {
    v_final_default = 0.0;
    a_default = -2.5;
  }
  p.v_final = number(j, "v_final", v_final_default, w);
  p.a_lead = number(j, "a_lead", a_default, w);
  p.t_start = number(j, "t_start", 0.0, w);
  if (const auto it = j.find("t_end"); it != j.end() && !it->is_null()) p.t_end = number(j, "t_end", 0.0, w);
  if (const auto it = j.find("components"); it != j.end()) {
    if (!it->is_array()) throw ValidationError("lead.components", "expected an array");
    for (const auto& c : *it) {
      check_keys(c, {"M", "omega"}, "lead.components");
      p.components.push_back({number(c, "M", 0.0, "lead.components"), number(c, "omega", 0.0, "lead.components")});
    }
  }
  if (p.kind == LeadKind::stop_at_light && p.v_final != 0.0)
    throw ValidationError("lead.v_final", "stop_at_light ends at standstill");
  p.validate();
  return p;
}

json lead_to_json(const LeadProfiled& p) {
  json j;
  j["kind"] = kind_name(p.kind);
  j["v0"] = p.v0;
  j["v_final"] = p.v_final;
  j["a_lead"] = p.a_lead;
  j["t_start"] = p.t_start;
  if (std::isfinite(p.t_end)) j["t_end"] = p.t_end;
  j["components"] = json::array();
  for (const auto& c : p.components) j["components"].push_back({{"M", c.amplitude}, {"omega", c.omega}});
  return j;
}

Scenario scenario_from_json(const json& doc) {
  check_keys(doc, {"n_vehicles", "dt", "horizon", "v_eq", "rng_seed", "congestion_fraction", "lead", "defaults",
                   "vehicles", "mixed", "start"},
             "");
  Scenario s;
  const std::uint64_t n = unsigned_int(doc, "n_vehicles", 2, "");
  if (n < 2) throw ValidationError("n_vehicles", "must be >= 2");
  if (n > 100000) throw ValidationError("n_vehicles", "unreasonably large");
  s.n_vehicles = static_cast<std::size_t>(n);
  s.dt = number(doc, "dt", s.dt, "");
  s.horizon = number(doc, "horizon", s.horizon, "");
  s.rng_seed = unsigned_int(doc, "rng_seed", 0, "");
  s.congestion_fraction = number(doc, "congestion_fraction", s.congestion_fraction, "");

  if (!doc.contains("lead")) throw ValidationError("lead", "required");
  s.lead = lead_from_json(doc.at("lead"));
  s.v_eq = number(doc, "v_eq", generate_lead(s.lead, 0.0).v, "");

  VehicleConfig base;
  if (doc.contains("defaults")) base = vehicle_from_json(doc.at("defaults"), base, "defaults");

  if (doc.contains("mixed") && doc.contains("vehicles"))
    throw ValidationError("mixed", "cannot be combined with explicit vehicles");
  if (doc.contains("mixed")) {
    s.followers = sample_mixed_platoon(s.rng_seed, mixed_from_json(doc.at("mixed"), base), s.n_vehicles - 1);
  } else if (doc.contains("vehicles")) {
    const json& vs = doc.at("vehicles");
    if (!vs.is_array() || vs.size() != s.n_vehicles - 1)
      throw ValidationError("vehicles", "expected an array with n_vehicles - 1 follower entries");
    s.followers.clear();
    for (std::size_t i = 0; i < vs.size(); ++i)
      s.followers.push_back(vehicle_from_json(vs[i], base, "vehicles[" + std::to_string(i) + "]"));
  } else {
    s.followers.assign(s.n_vehicles - 1, base);
  }
  if (const auto it = doc.find("start"); it != doc.end()) {
    if (!it->is_array() || it->size() != s.n_vehicles - 1)
      throw ValidationError("start", "expected an array with n_vehicles - 1 follower entries");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto w = "start[" + std::to_string(i) + "]";
      check_keys((*it)[i], {"v", "gap"}, w);
      if (!(*it)[i].contains("v") || !(*it)[i].contains("gap")) throw ValidationError(w, "needs v and gap");
      s.start.push_back({number((*it)[i], "v", 0.0, w), number((*it)[i], "gap", 0.0, w)});
    }
  }
  s.validate();
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["n_vehicles"] = s.n_vehicles;
  j["dt"] = s.dt;
  j["horizon"] = s.horizon;
  j["v_eq"] = s.v_eq;
  j["rng_seed"] = s.rng_seed;
  j["congestion_fraction"] = s.congestion_fraction;
  j["lead"] = lead_to_json(s.lead);
  j["vehicles"] = json::array();
  for (const auto& f : s.followers) j["vehicles"].push_back(vehicle_to_json(f));
  if (!s.start.empty()) {
    j["start"] = json::array();
    for (const auto& st : s.start) j["start"].push_back({{"v", st.v}, {"gap", st.gap}});
  }
  return j;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string(), std::string("malformed JSON: ") + e.what());
  }
}

Scenario parse_scenario(const std::filesystem::path& path) { return scenario_from_json(read_json(path)); }

std::string fixed6(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 6);
  if (res.ec != std::errc{}) return "nan";
  return {buf, res.ptr};
}

void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log) {
  os << kTrajectoryHeader << '\n';
  std::string line;
  for (Eigen::Index k = 0; k < log.ticks(); ++k) {
    for (Eigen::Index i = 0; i < log.vehicles(); ++i) {
      line.clear();
      line += fixed6(log.t[k]);
      line += ',';
      line += std::to_string(i);
      for (const auto* m : {&log.x, &log.v, &log.a, &log.v_target, &log.v_pid}) {
        line += ',';
        line += fixed6((*m)(k, i));
      }
      line += ',';
      if (std::isfinite(log.spacing(k, i))) line += fixed6(log.spacing(k, i));
      line += '\n';
      os << line;
    }
  }
}

json metrics_to_json(const MetricsReport& m) {
  json j;
  j["queue_length"] = m.queue_length;
  j["congestion_duration_s"] = m.congestion_duration_s;
  j["peak_deviation_mps"] = std::vector<double>(m.peak_deviation.data(), m.peak_deviation.data() + m.peak_deviation.size());
  j["min_spacing_m"] = m.min_spacing;
  j["crashes"] = json::array();
  for (const auto& c : m.crashes)
    j["crashes"].push_back({{"vehicle", c.vehicle}, {"t", c.t}, {"speed", c.speed}, {"spacing", c.spacing}});
  return j;
}

json safety_to_json(const SafetyReport& r) {
  json j;
  j["min_spacing_m"] = r.min_spacing;
  j["min_ttc_s"] = r.min_ttc;
  j["crash"] = r.crash;
  j["takeover_speed_mps"] = r.takeover_speed ? json(*r.takeover_speed) : json(nullptr);
  j["takeover_time_s"] = r.takeover_time ? json(*r.takeover_time) : json(nullptr);
  j["pairs"] = json::array();
  for (const auto& p : r.pairs)
    j["pairs"].push_back({{"follower", p.follower}, {"min_spacing_m", p.min_spacing}, {"min_ttc_s", p.min_ttc}});
  return j;
}

std::vector<std::filesystem::path> write_outputs(const TrajectoryLog& log, const MetricsReport& metrics,
                                                 const json& reports, const std::filesystem::path& out_dir,
                                                 const OutputOptions& opts) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  auto open = [&](const char* name) {
    const auto p = out_dir / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    written.push_back(p);
    return os;
  };
  {
    auto os = open("trajectories.csv");
    write_trajectory_csv(os, log);
  }
  {
    auto os = open("metrics.json");
    os << metrics_to_json(metrics).dump(2) << '\n';
  }
  if (!reports.is_null()) {
    auto os = open("reports.json");
    os << reports.dump(2) << '\n';
  }
  if (opts.plot) {
    auto os = open("plot.svg");
    os << render_svg(log);
  }
  return written;
}

std::vector<Drive> read_trajectory_drives(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader)
    throw ValidationError(path.string(), std::string("expected header '") + kTrajectoryHeader + "'");

  std::vector<Drive> drives;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() == 7) cells.emplace_back();  // empty trailing spacing
    if (cells.size() != 8) throw ValidationError(path.string() + ":" + std::to_string(row), "expected 8 columns");
    auto parse = [&](const std::string& s) {
      double x = 0.0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
      if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ValidationError(path.string() + ":" + std::to_string(row), "bad number '" + s + "'");
      return x;
    };
    const double vehicle = parse(cells[1]);
    if (vehicle < 0 || vehicle != std::floor(vehicle))
      throw ValidationError(path.string() + ":" + std::to_string(row), "bad vehicle index");
    const auto idx = static_cast<std::size_t>(vehicle);
    if (idx >= drives.size()) drives.resize(idx + 1);
    drives[idx].t.push_back(parse(cells[0]));
    drives[idx].v.push_back(parse(cells[3]));
    drives[idx].a.push_back(parse(cells[4]));
  }
  return drives;
}

}  // namespace accsim::io
