#pragma once

#include <optional>
#include <vector>

#include "accsim/sim.hpp"

namespace accsim {

inline constexpr double kTtcEpsilon = 1e-6;

/// Lower bound on the planner gain needed to command a_required while
/// closing on a decelerating predecessor:
///
///   k >= a_required / (v_lead - v_ego - tau * a_lead)
///
/// Only meaningful when the denominator is negative; otherwise the bound is
/// vacuous and nullopt is returned.
std::optional<double> required_gain(double v_lead, double v_ego, double a_lead, double tau, double a_required);

/// Constant deceleration that brings v_ego down to v_lead within the usable
/// gap s - delta: -(v_ego^2 - v_lead^2) / (2 max(s - delta, eps)).
double required_deceleration(double v_ego, double v_lead, double s, double delta);

struct GainInterval {
  double k_min{};
  double k_max{};  // string-stability ceiling 2 / tau
  bool feasible{};
};

/// Intersects the safety floor with the string-stability ceiling.
GainInterval gain_feasibility(double k_min, double tau);

struct PairSafety {
  std::size_t follower{};
  double min_spacing{};
  double min_ttc{};
};

struct SafetyReport {
  GainInterval gain{};
  double min_spacing{};
  double min_ttc{};
  bool crash{};
  std::optional<double> takeover_speed;  // follower speed when spacing first fell below delta
  std::optional<double> takeover_time;
  std::vector<PairSafety> pairs;
};

/// Spacing, time-to-collision and crash metrics over a whole run. TTC is
/// spacing / max(closing speed, 1e-6) floored at zero.
SafetyReport trajectory_safety(const TrajectoryLog& log, double delta);

}  // namespace accsim
