#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "accsim/fitlimits.hpp"
#include "accsim/io.hpp"
#include "accsim/overshoot.hpp"
#include "accsim/safety.hpp"
#include "accsim/sim.hpp"
#include "accsim/stability.hpp"

namespace fs = std::filesystem;
using accsim::ValidationError;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

void write_json(const fs::path& out_dir, const char* name, const json& j) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());
  std::ofstream os(out_dir / name, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + (out_dir / name).string());
  os << j.dump(2) << '\n';
}

double num(const json& j, const char* key, double fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw ValidationError(key, "expected a number");
  return it->get<double>();
}

double required_num(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(key, "required");
  return num(j, key, 0.0);
}

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where, "expected a JSON object");
  for (const auto& [k, _] : j.items())
    if (std::find_if(keys.begin(), keys.end(), [&](const char* a) { return k == a; }) == keys.end())
      throw ValidationError(where.empty() ? k : where + "." + k, "unknown field");
}

json stability_json(const accsim::StabilityReport& r) {
  json j;
  j["verdict"] = accsim::to_string(r.verdict);
  j["k_tau"] = r.k_tau;
  j["gains"] = json::array();
  for (const auto& g : r.gains) j["gains"].push_back({{"omega", g.omega}, {"magnitude", g.magnitude}});
  return j;
}

json follower_verdicts(const accsim::Scenario& sc) {
  json out = json::array();
  for (std::size_t i = 0; i < sc.followers.size(); ++i) {
    const auto& acc = sc.followers[i].acc;
    out.push_back({{"vehicle", i + 1},
                   {"k_tau", acc.k_v * acc.tau},
                   {"verdict", accsim::to_string(accsim::ss_condition(acc.k_v, acc.tau))}});
  }
  return out;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const fs::path& config, const fs::path& out, bool plot) {
  const auto sc = accsim::io::parse_scenario(config);
  const auto log = accsim::run(sc);
  const auto metrics = accsim::compute_metrics(log, sc.v_eq, sc.congestion_fraction);
  json reports;
  reports["string_stability"] = follower_verdicts(sc);
  reports["safety"] = accsim::io::safety_to_json(accsim::trajectory_safety(log, sc.followers.front().acc.delta));
  reports["amplification"] = std::vector<double>(metrics.amplification.data(),
                                                 metrics.amplification.data() + metrics.amplification.size());
  reports["congested_intervals"] = metrics.congested_intervals;
  for (const auto& p : accsim::io::write_outputs(log, metrics, reports, out, {plot})) std::cout << p.string() << '\n';
  return 0;
}

// {"k_v", "tau", "omega_min", "omega_max", "n_omega", "components": [{"M", "omega"}]}
int cmd_analyze_ss(const fs::path& config, const fs::path& out) {
  const json doc = accsim::io::read_json(config);
  only_keys(doc, {"k_v", "tau", "omega_min", "omega_max", "n_omega", "components"}, "");
  const double k = required_num(doc, "k_v");
  const double tau = required_num(doc, "tau");
  if (!(k > 0)) throw ValidationError("k_v", "must be > 0");
  if (!(tau > 0)) throw ValidationError("tau", "must be > 0");
  const double w0 = num(doc, "omega_min", 0.01), w1 = num(doc, "omega_max", 10.0);
  const double n = num(doc, "n_omega", 64);
  if (!(w0 > 0 && w1 > w0)) throw ValidationError("omega_min", "need 0 < omega_min < omega_max");
  if (!(n >= 2)) throw ValidationError("n_omega", "must be >= 2");

  json j = stability_json(accsim::analyze_ss(k, tau, accsim::frequency_grid(w0, w1, static_cast<Eigen::Index>(n))));
  if (doc.contains("components")) {
    const auto lead = accsim::io::lead_from_json({{"kind", "sine_sum"}, {"components", doc.at("components")}});
    const auto d = accsim::dampening_verdict(lead.components, k, tau);
    json comps = json::array();
    for (const auto& c : d.components) comps.push_back({{"omega", c.omega}, {"magnitude", c.magnitude}});
    j["dampening"] = {{"dampens", d.dampens}, {"components", comps}};
  }
  write_json(out, "ss.json", j);
  return 0;
}

// {"lead": ramp profile, "vehicle": follower config, "simulate": bool, "horizon", "dt"}
int cmd_overshoot(const fs::path& config, const fs::path& out) {
  const json doc = accsim::io::read_json(config);
  only_keys(doc, {"lead", "vehicle", "simulate", "horizon", "dt"}, "");
  if (!doc.contains("lead")) throw ValidationError("lead", "required");
  const auto lead = accsim::io::lead_from_json(doc.at("lead"));
  if (lead.kind != accsim::LeadKind::ramp || lead.v_final <= lead.v0)
    throw ValidationError("lead", "overshoot prediction needs an accelerating ramp");
  const auto veh = accsim::io::vehicle_from_json(doc.value("vehicle", json::object()), {}, "vehicle");
  if (!veh.limits) throw ValidationError("vehicle.limits", "overshoot needs acceleration limits");

  json j;
  j["variants"] = json::object();
  for (auto q : {accsim::OvershootQuadratic::relative, accsim::OvershootQuadratic::full,
                 accsim::OvershootQuadratic::absolute}) {
    const auto s = accsim::predict_overshoot(lead, veh.acc, *veh.limits, q);
    j["variants"][accsim::to_string(q)] = {{"t1_s", s.t1}, {"spacing_t1_m", s.s_t1}, {"dT_s", s.dT},
                                           {"v_os_mps", s.v_os}};
  }
  j["default"] = accsim::to_string(accsim::OvershootQuadratic::relative);
  if (doc.value("simulate", false)) {
    auto sc = accsim::make_scenario(2, veh, lead, num(doc, "horizon", 120.0), num(doc, "dt", 0.1));
    const auto log = accsim::run(sc);
    j["simulated_peak_mps"] = log.v.col(1).maxCoeff();
  }
  write_json(out, "overshoot.json", j);
  return 0;
}

// {"v_lead", "v_ego", "a_lead", "tau", "a_required" | ("s", "delta"), "scenario": {...}}
int cmd_safety(const fs::path& config, const fs::path& out) {
  const json doc = accsim::io::read_json(config);
  only_keys(doc, {"v_lead", "v_ego", "a_lead", "tau", "a_required", "s", "delta", "scenario"}, "");
  json j;
  if (doc.contains("v_lead")) {
    const double v_lead = required_num(doc, "v_lead"), v_ego = required_num(doc, "v_ego");
    const double a_lead = num(doc, "a_lead", 0.0), tau = required_num(doc, "tau");
    if (!(tau > 0)) throw ValidationError("tau", "must be > 0");
    double a_req = 0.0;
    if (doc.contains("a_required")) {
      a_req = num(doc, "a_required", 0.0);
    } else {
      a_req = accsim::required_deceleration(v_ego, v_lead, required_num(doc, "s"), num(doc, "delta", 2.0));
    }
    j["a_required_mps2"] = a_req;
    const auto k = accsim::required_gain(v_lead, v_ego, a_lead, tau, a_req);
    j["k_min"] = k ? json(*k) : json(nullptr);
    const auto f = accsim::gain_feasibility(k.value_or(0.0), tau);
    j["k_max"] = f.k_max;
    j["feasible"] = f.feasible;
  }
  if (doc.contains("scenario")) {
    const auto sc = accsim::io::scenario_from_json(doc.at("scenario"));
    const auto log = accsim::run(sc);
    j["trajectory"] = accsim::io::safety_to_json(accsim::trajectory_safety(log, sc.followers.front().acc.delta));
  }
  if (j.is_null()) throw ValidationError("v_lead", "need the gain inputs or a scenario");
  write_json(out, "safety.json", j);
  return 0;
}

// {"base": scenario document, "grid": {param: [values]}, "threads": n}
int cmd_sweep(const fs::path& config, const fs::path& out, unsigned threads_flag) {
  const json doc = accsim::io::read_json(config);
  only_keys(doc, {"base", "grid", "threads"}, "");
  if (!doc.contains("base") || !doc.contains("grid")) throw ValidationError("base", "sweep needs base and grid");
  const json& base = doc.at("base");
  const json& grid = doc.at("grid");
  if (!grid.is_object() || grid.empty()) throw ValidationError("grid", "expected a non-empty object");

  static const std::vector<std::string> kAcc{"k_v", "tau", "delta", "v_set"};
  static const std::vector<std::string> kLim{"a0", "beta", "v_c", "d0", "theta"};
  static const std::vector<std::string> kTop{"dt", "horizon", "rng_seed"};
  auto in = [](const std::vector<std::string>& v, const std::string& k) {
    return std::find(v.begin(), v.end(), k) != v.end();
  };

  std::vector<std::pair<std::string, json>> axes;
  for (const auto& [k, vals] : grid.items()) {
    if (!in(kAcc, k) && !in(kLim, k) && !in(kTop, k)) throw ValidationError("grid." + k, "not a sweepable parameter");
    if (!vals.is_array() || vals.empty()) throw ValidationError("grid." + k, "expected a non-empty array");
    axes.emplace_back(k, vals);
  }

  // Cartesian product, last axis fastest.
  std::vector<json> points{json::object()};
  for (const auto& [k, vals] : axes) {
    std::vector<json> next;
    for (const auto& p : points)
      for (const auto& v : vals) {
        json q = p;
        q[k] = v;
        next.push_back(std::move(q));
      }
    points = std::move(next);
  }

  auto apply = [&](json d, const json& point) {
    auto patch_vehicle = [&](json& v, const std::string& k, const json& x) {
      if (in(kAcc, k)) {
        v[k] = x;
      } else if (!v.contains("limits") || !v["limits"].is_null()) {
        v["limits"][k] = x;
      }
    };
    for (const auto& [k, x] : point.items()) {
      if (in(kTop, k)) {
        d[k] = x;
        continue;
      }
      if (!d.contains("defaults")) d["defaults"] = json::object();
      patch_vehicle(d["defaults"], k, x);
      if (d.contains("vehicles") && d["vehicles"].is_array())
        for (auto& v : d["vehicles"]) patch_vehicle(v, k, x);
    }
    return d;
  };

  // Validate everything before any work starts.
  std::vector<accsim::Scenario> scenarios;
  for (std::size_t i = 0; i < points.size(); ++i) {
    try {
      scenarios.push_back(accsim::io::scenario_from_json(apply(base, points[i])));
    } catch (const ValidationError& e) {
      throw ValidationError("grid[" + std::to_string(i) + "]." + e.field(), e.reason());
    }
  }

  unsigned n_threads = threads_flag ? threads_flag : static_cast<unsigned>(num(doc, "threads", 0));
  if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(scenarios.size()));

  std::map<std::size_t, json> results;  // keyed by id, so merge order does not matter
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < scenarios.size();) {
      try {
        const auto& sc = scenarios[i];
        const auto log = accsim::run(sc);
        const auto m = accsim::compute_metrics(log, sc.v_eq, sc.congestion_fraction);
        json r{{"id", i}, {"params", points[i]}, {"metrics", accsim::io::metrics_to_json(m)},
               {"string_stability", follower_verdicts(sc)}};
        std::lock_guard lock(mu);
        results.emplace(i, std::move(r));
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  json runs = json::array();
  for (auto& [_, r] : results) runs.push_back(std::move(r));
  write_json(out, "sweep.json", {{"runs", runs}});
  return 0;
}

accsim::LimitModeld limits_of(const json& j) { return accsim::io::limits_from_json(j, {}, "synthetic.limits"); }

// {"window_s", "v_c", "accel": [csv...], "decel": [csv...], "synthetic": {...}}
int cmd_fit_limits(const fs::path& config, const fs::path& out) {
  const json doc = accsim::io::read_json(config);
  only_keys(doc, {"window_s", "v_c", "accel", "decel", "synthetic"}, "");
  const double window = num(doc, "window_s", 0.5);
  const double v_c = num(doc, "v_c", 40.0);
  if (!(window > 0)) throw ValidationError("window_s", "must be > 0");
  if (!(v_c > 0)) throw ValidationError("v_c", "must be > 0");

  std::map<accsim::BoundSide, std::vector<accsim::Drive>> drives;
  auto load = [&](const char* key, accsim::BoundSide side) {
    const auto it = doc.find(key);
    if (it == doc.end()) return;
    if (!it->is_array()) throw ValidationError(key, "expected an array of CSV paths");
    for (const auto& p : *it) {
      if (!p.is_string()) throw ValidationError(key, "expected an array of CSV paths");
      fs::path path = p.get<std::string>();
      if (path.is_relative()) path = config.parent_path() / path;
      for (auto& d : accsim::io::read_trajectory_drives(path)) drives[side].push_back(std::move(d));
    }
  };
  load("accel", accsim::BoundSide::accel);
  load("decel", accsim::BoundSide::decel);

  if (const auto it = doc.find("synthetic"); it != doc.end()) {
    const json& s = *it;
    only_keys(s, {"limits", "speeds", "duration_s", "dt", "noise_sd", "seed"}, "synthetic");
    const auto lim = limits_of(s.value("limits", json::object()));
    const double dur = num(s, "duration_s", 3.0), dt = num(s, "dt", 0.01), sd = num(s, "noise_sd", 0.0);
    const auto seed = s.value("seed", std::uint64_t{0});
    const auto speeds = s.value("speeds", std::vector<double>{5, 10, 15, 20, 25, 30, 35});
    for (std::size_t i = 0; i < speeds.size(); ++i) {
      drives[accsim::BoundSide::accel].push_back(
          accsim::synthetic_drive(lim, speeds[i], accsim::BoundSide::accel, dur, dt, 2.0, sd, seed + 2 * i));
      drives[accsim::BoundSide::decel].push_back(
          accsim::synthetic_drive(lim, speeds[i], accsim::BoundSide::decel, dur, dt, 2.0, sd, seed + 2 * i + 1));
    }
  }
  if (drives.empty()) throw ValidationError("accel", "no drives given");

  json j;
  std::map<accsim::BoundSide, accsim::LinearBoundFit> fits;
  for (auto& [side, ds] : drives) {
    std::vector<std::size_t> skipped;
    const auto pts = accsim::extract_tipping_points(ds, window, side, &skipped);
    const auto fit = accsim::fit_linear_limit(pts, v_c, side);
    fits[side] = fit;
    json tp = json::array();
    for (const auto& p : pts) tp.push_back({{"v", p.v}, {"a", p.a}});
    const bool acc = side == accsim::BoundSide::accel;
    j[acc ? "accel" : "decel"] = {{acc ? "a0" : "d0", fit.intercept}, {acc ? "beta" : "theta", fit.slope},
                                  {"v_c", fit.v_c}, {"rms", fit.rms}, {"n_points", fit.n_points},
                                  {"skipped_drives", skipped}, {"tipping_points", tp}};
  }
  write_json(out, "fit.json", j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear ACC platoon simulator with acceleration/deceleration limits"};
  app.require_subcommand(1);

  fs::path config, out;
  bool plot = false;
  unsigned threads = 0;
  auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON input")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->required();
    return sub;
  };
  auto* sim = add("simulate", "run a scenario and write trajectories.csv, metrics.json, reports.json");
  sim->add_flag("--plot", plot, "also write plot.svg");
  auto* ss = add("analyze-ss", "string-stability verdict and gain curve");
  auto* os = add("overshoot", "predicted overshoot after an acceleration-limited ramp");
  auto* sf = add("safety", "minimum safe gain and trajectory safety");
  auto* sw = add("sweep", "parameter grid over a base scenario");
  sw->add_option("--threads", threads, "worker threads (0 = hardware)");
  auto* fl = add("fit-limits", "fit acceleration/deceleration bounds from drives");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config, out, plot);
    if (ss->parsed()) return cmd_analyze_ss(config, out);
    if (os->parsed()) return cmd_overshoot(config, out);
    if (sf->parsed()) return cmd_safety(config, out);
    if (sw->parsed()) return cmd_sweep(config, out, threads);
    if (fl->parsed()) return cmd_fit_limits(config, out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
