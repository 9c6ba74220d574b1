#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "accsim/actuation.hpp"
#include "accsim/core.hpp"
#include "accsim/planner.hpp"

namespace accsim {

/// Controller stack of one follower.
struct VehicleConfig {
  AccParamsd acc{};
  std::optional<LimitModeld> limits{LimitModeld{}};  // nullopt = unbounded
  PiGainsd pi{};
  Actuation actuation{Actuation::pi};

  void validate() const;
  friend bool operator==(const VehicleConfig&, const VehicleConfig&) = default;
};

/// Non-equilibrium start of one follower.
struct FollowerStart {
  double v{};
  double gap{};
  friend bool operator==(const FollowerStart&, const FollowerStart&) = default;
};

/// A platoon run. Vehicle 0 is the leader and follows `lead`; vehicles
/// 1..n-1 use `followers[i - 1]`. All start at equilibrium at `v_eq`
/// unless `start` gives one entry per follower.
struct Scenario {
  std::size_t n_vehicles{2};
  std::vector<VehicleConfig> followers{VehicleConfig{}};
  LeadProfiled lead{};
  double dt{0.1};
  double horizon{60.0};
  double v_eq{20.0};
  std::uint64_t rng_seed{0};
  double congestion_fraction{0.9};
  std::vector<FollowerStart> start{};

  void validate() const;
  std::size_t ticks() const;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Homogeneous scenario helper: n vehicles sharing one follower config.
Scenario make_scenario(std::size_t n_vehicles, const VehicleConfig& follower, const LeadProfiled& lead,
                       double horizon, double dt = 0.1);

struct LeadSample {
  double v{};
  double a{};
};

/// Lead speed and acceleration at time t.
LeadSample generate_lead(const LeadProfiled& profile, double t);

/// Distance the lead covers over [t0, t1]. Closed form where the profile
/// allows it; sine sums that can touch standstill fall back to quadrature.
double lead_distance(const LeadProfiled& profile, double t0, double t1);

/// Full platoon state at one tick. Vectors are indexed by vehicle; `gap`
/// is the spacing to the predecessor (unused for the leader).
struct PlatoonState {
  std::size_t tick{0};
  double t{0.0};
  Eigen::VectorXd x, v, v_pid, i_term, gap;
  std::vector<bool> crashed;
};

/// Signals computed during one step, logged against the tick they start from.
struct TickControls {
  Eigen::VectorXd a, v_target, v_pid;
};

PlatoonState initial_state(const Scenario& scenario);

/// Advances one tick: leader from the profile, then each follower from its
/// predecessor's state at the same tick (planner -> setpoint -> PI or ideal
/// actuation -> forward Euler). A follower whose gap reaches zero is
/// recorded as crashed and thereafter moves with its predecessor.
PlatoonState step(const PlatoonState& state, const Scenario& scenario, TickControls* controls = nullptr);

struct CrashEvent {
  std::size_t vehicle{};  // the follower that closed the gap
  double t{};
  double speed{};
  double spacing{};
};

/// Per-tick signals, rows = ticks, columns = vehicles. Leader spacing is NaN.
struct TrajectoryLog {
  Eigen::VectorXd t;
  Eigen::MatrixXd x, v, a, v_target, v_pid, spacing;
  std::vector<CrashEvent> crashes;
  double dt{};

  Eigen::Index ticks() const { return t.size(); }
  Eigen::Index vehicles() const { return x.cols(); }
};

TrajectoryLog run(const Scenario& scenario);

struct MetricsReport {
  int queue_length{};
  double congestion_duration_s{};
  Eigen::VectorXd peak_deviation;  // max |v - v_eq| per vehicle
  Eigen::VectorXd amplification;   // peak_deviation[i] / peak_deviation[i-1], i >= 1
  double min_spacing{};
  std::vector<CrashEvent> crashes;
  std::vector<int> congested_intervals;  // disjoint congested episodes per vehicle
};

MetricsReport compute_metrics(const TrajectoryLog& log, double v_eq, double congestion_fraction = 0.9);

struct Range {
  double lo{};
  double hi{};
  friend bool operator==(const Range&, const Range&) = default;
};

/// Sampling box over the extended parameter set {k, tau, a0, beta, d0, theta}.
/// Everything else comes from `base`.
struct MixedRanges {
  Range k_v{0.3, 1.2};
  Range tau{1.0, 2.0};
  Range a0{0.3, 0.6};
  Range beta{0.01, 0.02};
  Range d0{1.5, 3.5};
  Range theta{0.0, 0.04};
  VehicleConfig base{};

  void validate() const;
};

/// Independent uniform draws per follower, reproducible from `seed`.
std::vector<VehicleConfig> sample_mixed_platoon(std::uint64_t seed, const MixedRanges& ranges, std::size_t n_followers);

}  // namespace accsim
