#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "accsim/sim.hpp"

namespace accsim {

void VehicleConfig::validate() const {
  acc.validate();
  if (limits) limits->validate();
  pi.validate();
}

void Scenario::validate() const {
  detail::require(n_vehicles >= 2, "n_vehicles", "must be >= 2");
  detail::require(followers.size() == n_vehicles - 1, "vehicles", "need one config per follower");
  detail::require(dt > 0, "dt", "must be > 0");
  detail::require(horizon >= dt, "horizon", "must be >= dt");
  detail::require(v_eq >= 0, "v_eq", "must be >= 0");
  detail::require(congestion_fraction > 0 && congestion_fraction <= 1, "congestion_fraction", "must be in (0, 1]");
  lead.validate();
  for (const auto& f : followers) f.validate();
  detail::require(start.empty() || start.size() == n_vehicles - 1, "start", "need one entry per follower");
  for (const auto& st : start) {
    detail::require(st.v >= 0, "start.v", "must be >= 0");
    detail::require(st.gap > 0, "start.gap", "must be > 0");
  }
}

std::size_t Scenario::ticks() const {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(horizon / dt)));
}

Scenario make_scenario(std::size_t n_vehicles, const VehicleConfig& follower, const LeadProfiled& lead,
                       double horizon, double dt) {
  Scenario s;
  s.n_vehicles = n_vehicles;
  s.followers.assign(n_vehicles > 0 ? n_vehicles - 1 : 0, follower);
  s.lead = lead;
  s.horizon = horizon;
  s.dt = dt;
  s.v_eq = generate_lead(lead, 0.0).v;
  return s;
}

PlatoonState initial_state(const Scenario& sc) {
  const auto n = static_cast<Eigen::Index>(sc.n_vehicles);
  PlatoonState s;
  s.x = Eigen::VectorXd::Zero(n);
  s.v = Eigen::VectorXd::Constant(n, sc.v_eq);
  s.v_pid = s.v;
  s.i_term = Eigen::VectorXd::Zero(n);
  s.gap = Eigen::VectorXd::Zero(n);
  s.crashed.assign(sc.n_vehicles, false);
  s.v[0] = generate_lead(sc.lead, 0.0).v;
  s.v_pid[0] = s.v[0];
  for (Eigen::Index i = 1; i < n; ++i) {
    const auto f = static_cast<std::size_t>(i - 1);
    if (sc.start.empty()) {
      s.gap[i] = equilibrium_spacing(sc.v_eq, sc.followers[f].acc);
    } else {
      s.v[i] = s.v_pid[i] = sc.start[f].v;
      s.gap[i] = sc.start[f].gap;
    }
    s.x[i] = s.x[i - 1] - s.gap[i];
  }
  return s;
}

PlatoonState step(const PlatoonState& s, const Scenario& sc, TickControls* controls) {
  const Eigen::Index n = s.x.size();
  const double dt = sc.dt;
  PlatoonState next = s;
  next.tick = s.tick + 1;
  next.t = static_cast<double>(next.tick) * dt;

  TickControls local;
  TickControls& c = controls ? *controls : local;
  c.a.resize(n);
  c.v_target.resize(n);
  c.v_pid.resize(n);

  const LeadSample lead = generate_lead(sc.lead, s.t);
  c.a[0] = lead.a;
  c.v_target[0] = s.v[0];
  c.v_pid[0] = s.v[0];
  next.x[0] = s.x[0] + s.v[0] * dt;
  next.v[0] = generate_lead(sc.lead, next.t).v;
  next.v_pid[0] = next.v[0];

  for (Eigen::Index i = 1; i < n; ++i) {
    const VehicleConfig& cfg = sc.followers[static_cast<std::size_t>(i - 1)];
    const double v = s.v[i];
    next.x[i] = s.x[i] + v * dt;

    if (s.crashed[static_cast<std::size_t>(i)]) {
      // locked to the predecessor at the frozen gap
      next.v[i] = next.v[i - 1];
      next.x[i] = next.x[i - 1] - s.gap[i];
      next.v_pid[i] = next.v[i];
      c.a[i] = (next.v[i] - v) / dt;
      c.v_target[i] = next.v[i];
      c.v_pid[i] = next.v[i];
      continue;
    }

    const double v_target = target_speed(PlannerInput<double>{s.gap[i], s.v[i - 1], v}, cfg.acc);
    const double v_pid = advance_setpoint(s.v_pid[i], v_target, v, cfg.limits, dt);

    double v_new = v_pid;
    if (cfg.actuation == Actuation::pi) {
      const VehicleStated vs{s.x[i], v, 0.0, s.v_pid[i], s.i_term[i]};
      const auto out = pi_step(vs, v_pid, cfg.pi, cfg.limits, dt);
      next.i_term[i] = out.i_term;
      v_new = std::max(0.0, v + out.a_cmd * dt);
    }
    c.a[i] = (v_new - v) / dt;
    c.v_target[i] = v_target;
    c.v_pid[i] = v_pid;
    next.v[i] = v_new;
    next.v_pid[i] = v_pid;

    next.gap[i] = s.gap[i] + (s.v[i - 1] - v) * dt;
    if (next.gap[i] <= 0.0) next.crashed[static_cast<std::size_t>(i)] = true;
  }
  return next;
}

TrajectoryLog run(const Scenario& sc) {
  sc.validate();
  const auto ticks = static_cast<Eigen::Index>(sc.ticks());
  const auto n = static_cast<Eigen::Index>(sc.n_vehicles);
  TrajectoryLog log;
  log.dt = sc.dt;
  log.t.resize(ticks);
  for (auto* m : {&log.x, &log.v, &log.a, &log.v_target, &log.v_pid, &log.spacing}) m->resize(ticks, n);

  PlatoonState s = initial_state(sc);
  TickControls c;
  for (Eigen::Index k = 0; k < ticks; ++k) {
    PlatoonState next = step(s, sc, &c);
    log.t[k] = s.t;
    log.x.row(k) = s.x.transpose();
    log.v.row(k) = s.v.transpose();
    log.a.row(k) = c.a.transpose();
    log.v_target.row(k) = c.v_target.transpose();
    log.v_pid.row(k) = c.v_pid.transpose();
    log.spacing.row(k) = s.gap.transpose();
    log.spacing(k, 0) = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index i = 1; i < n; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      if (next.crashed[iu] && !s.crashed[iu]) log.crashes.push_back({iu, next.t, next.v[i], next.gap[i]});
    }
    s = std::move(next);
  }
  return log;
}

MetricsReport compute_metrics(const TrajectoryLog& log, double v_eq, double congestion_fraction) {
  MetricsReport m;
  const Eigen::Index n = log.vehicles();
  const double threshold = congestion_fraction * v_eq;

  const auto congested = (log.v.array() < threshold).eval();
  const Eigen::VectorXi per_tick = congested.cast<int>().rowwise().sum();
  m.queue_length = per_tick.size() ? per_tick.maxCoeff() : 0;
  m.congestion_duration_s = static_cast<double>((per_tick.array() > 0).count()) * log.dt;

  m.congested_intervals.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    bool prev = false;
    for (Eigen::Index k = 0; k < log.ticks(); ++k) {
      if (congested(k, i) && !prev) ++m.congested_intervals[static_cast<std::size_t>(i)];
      prev = congested(k, i);
    }
  }

  m.peak_deviation = (log.v.array() - v_eq).abs().colwise().maxCoeff().transpose();
  m.amplification = Eigen::VectorXd::Zero(std::max<Eigen::Index>(0, n - 1));
  for (Eigen::Index i = 1; i < n; ++i) {
    const double prev = m.peak_deviation[i - 1];
    m.amplification[i - 1] = prev > 0 ? m.peak_deviation[i] / prev : std::numeric_limits<double>::infinity();
  }

  m.min_spacing = std::numeric_limits<double>::infinity();
  if (n > 1) m.min_spacing = log.spacing.rightCols(n - 1).minCoeff();
  m.crashes = log.crashes;
  return m;
}

void MixedRanges::validate() const {
  for (const auto* r : {&k_v, &tau, &a0, &beta, &d0, &theta})
    detail::require(r->hi >= r->lo, "ranges", "hi must be >= lo");
  detail::require(k_v.lo > 0 && tau.lo > 0 && a0.lo > 0 && d0.lo > 0, "ranges", "k_v, tau, a0, d0 must be > 0");
  detail::require(beta.lo >= 0 && theta.lo >= 0, "ranges", "beta, theta must be >= 0");
  base.validate();
}

std::vector<VehicleConfig> sample_mixed_platoon(std::uint64_t seed, const MixedRanges& r, std::size_t n_followers) {
  r.validate();
  std::mt19937_64 gen(seed);
  // 53-bit mantissa draw: the engine sequence is pinned by the standard,
  // uniform_real_distribution is not
  auto draw = [&](const Range& range) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return range.lo + (range.hi - range.lo) * u;
  };
  std::vector<VehicleConfig> out;
  out.reserve(n_followers);
  for (std::size_t i = 0; i < n_followers; ++i) {
    VehicleConfig cfg = r.base;
    cfg.acc.k_v = draw(r.k_v);
    cfg.acc.tau = draw(r.tau);
    LimitModeld lim = r.base.limits.value_or(LimitModeld{});
    lim.a0 = draw(r.a0);
    lim.beta = draw(r.beta);
    lim.d0 = draw(r.d0);
    lim.theta = draw(r.theta);
    cfg.limits = lim;
    out.push_back(cfg);
  }
  return out;
}

}  // namespace accsim
