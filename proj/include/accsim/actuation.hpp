#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "accsim/core.hpp"

namespace accsim {

template <typename Scalar>
struct PiGains {
  Scalar kp{0.9};
  Scalar ki{0.1};
  Scalar i_cap{5.0};

  void validate() const {
    detail::require(kp > 0, "kp", "must be > 0");
    detail::require(ki >= 0, "ki", "must be >= 0");
    detail::require(i_cap > 0, "i_cap", "must be > 0");
  }

  friend bool operator==(const PiGains&, const PiGains&) = default;
};

using PiGainsd = PiGains<double>;

/// How the low-level layer realizes the setpoint.
/// `ideal` sets v_ego to v_pid each tick (no tracking lag).
enum class Actuation { pi, ideal };

template <typename Scalar>
struct PiOutput {
  Scalar a_cmd{};
  Scalar i_term{};
};

/// Moves the low-level setpoint toward the planner target, no faster than the
/// acceleration window evaluated at the ego speed allows. Never below zero.
template <typename Scalar>
Scalar advance_setpoint(Scalar v_pid, Scalar v_target, Scalar v_ego,
                        const std::optional<LimitModel<Scalar>>& lim, Scalar dt) {
  const auto w = accel_window(v_ego, lim);
  const Scalar lo = v_pid + w.lower * dt;
  const Scalar hi = v_pid + w.upper * dt;
  const Scalar next = v_target < lo ? lo : (v_target > hi ? hi : v_target);
  return std::max(Scalar(0), next);
}

template <typename Scalar>
Scalar advance_setpoint(Scalar v_pid, Scalar v_target, Scalar v_ego, const LimitModel<Scalar>& lim,
                        Scalar dt) {
  return advance_setpoint(v_pid, v_target, v_ego, std::optional<LimitModel<Scalar>>(lim), dt);
}

/// One PI tracking step. The command uses the integral accumulated so far,
/// is saturated by the limit window at the current speed, and the returned
/// integral includes this tick's error (clamped to +-i_cap).
template <typename Scalar>
PiOutput<Scalar> pi_step(const VehicleState<Scalar>& state, Scalar v_pid, const PiGains<Scalar>& gains,
                         const std::optional<LimitModel<Scalar>>& lim, Scalar dt) {
  const Scalar err = v_pid - state.v;
  const Scalar raw = gains.kp * err + gains.ki * state.i_term;
  const Scalar a_cmd = accel_window(state.v, lim).clamp(raw);
  const Scalar i_term = std::clamp(state.i_term + err * dt, -gains.i_cap, gains.i_cap);
  return {a_cmd, i_term};
}

template <typename Scalar>
PiOutput<Scalar> pi_step(const VehicleState<Scalar>& state, Scalar v_pid, const PiGains<Scalar>& gains,
                         const LimitModel<Scalar>& lim, Scalar dt) {
  return pi_step(state, v_pid, gains, std::optional<LimitModel<Scalar>>(lim), dt);
}

/// Asymptotic speed of a vehicle accelerating at its bound: a0/beta + v_c.
template <typename Scalar>
Scalar cap_speed(const LimitModel<Scalar>& lim) {
  return lim.a0 / lim.beta + lim.v_c;
}

/// Speed after `t` seconds of sustained maximum acceleration from v0, the
/// solution of dv/dt = a0 + (v_c - v) * beta:
///
///   v(t) = (v0 - v_c - a0/beta) e^{-beta t} + a0/beta + v_c
///
/// With beta == 0 the bound is constant and v(t) = v0 + a0 t.
template <typename Scalar>
Scalar max_accel_speed(Scalar v0, const LimitModel<Scalar>& lim, Scalar t) {
  if (lim.beta == 0) return v0 + lim.a0 * t;
  const Scalar cap = cap_speed(lim);
  return (v0 - cap) * std::exp(-lim.beta * t) + cap;
}

/// Distance covered over [0, t] on the same trajectory (antiderivative of
/// max_accel_speed).
template <typename Scalar>
Scalar max_accel_distance(Scalar v0, const LimitModel<Scalar>& lim, Scalar t) {
  if (lim.beta == 0) return v0 * t + Scalar(0.5) * lim.a0 * t * t;
  const Scalar cap = cap_speed(lim);
  return cap * t + (v0 - cap) * (-std::expm1(-lim.beta * t)) / lim.beta;
}

}  // namespace accsim
