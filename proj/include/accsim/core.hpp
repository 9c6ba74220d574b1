#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace accsim {

/// Raised when a parameter set or document violates a documented invariant.
/// `field()` names the offending entry so diagnostics can point at it.
class ValidationError : public std::invalid_argument {
public:
  ValidationError(std::string field, std::string reason)
      : std::invalid_argument(field + ": " + reason), field_(std::move(field)), reason_(std::move(reason)) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }

private:
  std::string field_;
  std::string reason_;
};

namespace detail {
inline void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ValidationError(field, what);
}
}  // namespace detail

/// One row of a piecewise-constant gain table: the gain applies from
/// `v_from` upwards until the next row.
template <typename Scalar>
struct GainStep {
  Scalar v_from{};
  Scalar k{};

  friend bool operator==(const GainStep&, const GainStep&) = default;
};

/// Parameters of the factory linear ACC planner.
///
/// `k_v` is the gain below the first scheduled step; an empty schedule means
/// the gain is constant over speed. Spacing policy is constant time headway,
/// s* = tau * v + delta.
template <typename Scalar>
struct AccParams {
  Scalar k_v{0.5};
  Scalar tau{1.5};
  Scalar delta{2.0};
  Scalar v_set{40.0};
  std::vector<GainStep<Scalar>> schedule{};

  void validate() const {
    detail::require(k_v > 0, "k_v", "must be > 0");
    detail::require(tau > 0, "tau", "must be > 0");
    detail::require(delta >= 0, "delta", "must be >= 0");
    detail::require(v_set > 0, "v_set", "must be > 0");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
      detail::require(schedule[i].k > 0, "schedule.k", "must be > 0");
      detail::require(schedule[i].v_from >= 0, "schedule.v_from", "must be >= 0");
      if (i > 0)
        detail::require(schedule[i].v_from > schedule[i - 1].v_from, "schedule.v_from",
                                "must be strictly increasing");
    }
  }

  friend bool operator==(const AccParams&, const AccParams&) = default;
};

/// Affine acceleration and deceleration bounds.
///
///   accel_bound(v) =   a0 + (v_c - v) * beta
///   decel_bound(v) = -(d0 + (v_c - v) * theta)
///
/// Both bounds weaken as speed rises. d0 is a positive magnitude.
template <typename Scalar>
struct LimitModel {
  Scalar a0{0.4};
  Scalar beta{0.015};
  Scalar v_c{40.0};
  Scalar d0{2.5};
  Scalar theta{0.03};

  void validate() const {
    detail::require(a0 > 0, "a0", "must be > 0");
    detail::require(beta >= 0, "beta", "must be >= 0");
    detail::require(v_c > 0, "v_c", "must be > 0");
    detail::require(d0 > 0, "d0", "must be > 0");
    detail::require(theta >= 0, "theta", "must be >= 0");
    // affine in v, so positivity on [0, v_c] reduces to the endpoints
    detail::require(a0 + v_c * beta > 0, "beta", "accel bound must stay positive on [0, v_c]");
  }

  friend bool operator==(const LimitModel&, const LimitModel&) = default;
};

/// Kinematic and controller state of one vehicle.
template <typename Scalar>
struct VehicleState {
  Scalar x{};
  Scalar v{};
  Scalar a{};
  Scalar v_pid{};
  Scalar i_term{};
};

enum class LeadKind { constant, sine_sum, ramp, emergency_brake, stop_at_light };

template <typename Scalar>
struct SineComponent {
  Scalar amplitude{};
  Scalar omega{};

  friend bool operator==(const SineComponent&, const SineComponent&) = default;
};

/// Parametric lead-vehicle speed signal.
///
/// - constant:        v0 throughout.
/// - sine_sum:        v0 + sum M_i sin(omega_i (t - t_start)) on [t_start, t_end], v0 elsewhere.
/// - ramp:            v0 until t_start, then moves toward v_final at |a_lead|, then holds.
/// - emergency_brake: ramp downward to v_final (default v0 / 2).
/// - stop_at_light:   ramp downward to standstill.
template <typename Scalar>
struct LeadProfile {
  LeadKind kind{LeadKind::constant};
  std::vector<SineComponent<Scalar>> components{};
  Scalar v0{20.0};
  Scalar v_final{20.0};
  Scalar a_lead{3.0};
  Scalar t_start{0.0};
  Scalar t_end{std::numeric_limits<Scalar>::infinity()};

  void validate() const {
    detail::require(v0 >= 0, "lead.v0", "must be >= 0");
    detail::require(t_start >= 0, "lead.t_start", "must be >= 0");
    detail::require(t_end > t_start, "lead.t_end", "must be > t_start");
    switch (kind) {
      case LeadKind::constant:
        break;
      case LeadKind::sine_sum:
        detail::require(!components.empty(), "lead.components", "sine_sum needs components");
        for (const auto& c : components) {
          detail::require(c.amplitude > 0, "lead.components.M", "must be > 0");
          detail::require(c.omega > 0, "lead.components.omega", "must be > 0");
        }
        break;
      case LeadKind::ramp:
      case LeadKind::emergency_brake:
      case LeadKind::stop_at_light:
        detail::require(v_final >= 0, "lead.v_final", "must be >= 0");
        detail::require(a_lead != 0, "lead.a_lead", "must be non-zero");
        break;
    }
    if (kind == LeadKind::emergency_brake)
      detail::require(v_final < v0, "lead.v_final", "emergency brake must end below v0");
  }

  friend bool operator==(const LeadProfile&, const LeadProfile&) = default;
};

using AccParamsd = AccParams<double>;
using LimitModeld = LimitModel<double>;
using VehicleStated = VehicleState<double>;
using LeadProfiled = LeadProfile<double>;

/// Gap at which the planner commands no correction: tau * v + delta.
template <typename Scalar>
constexpr Scalar equilibrium_spacing(Scalar v, const AccParams<Scalar>& params) {
  return params.tau * v + params.delta;
}

/// Upper acceleration bound at speed v. Negative above the cap speed a0/beta + v_c.
template <typename Scalar>
constexpr Scalar accel_bound(Scalar v, const LimitModel<Scalar>& lim) {
  return lim.a0 + (lim.v_c - v) * lim.beta;
}

/// Lower (signed, braking) acceleration bound at speed v.
template <typename Scalar>
constexpr Scalar decel_bound(Scalar v, const LimitModel<Scalar>& lim) {
  return -(lim.d0 + (lim.v_c - v) * lim.theta);
}

/// Signed acceleration window [lower, upper] at one speed.
template <typename Scalar>
struct AccelWindow {
  Scalar lower{-std::numeric_limits<Scalar>::infinity()};
  Scalar upper{std::numeric_limits<Scalar>::infinity()};

  constexpr Scalar clamp(Scalar a) const { return a < lower ? lower : (a > upper ? upper : a); }
};

/// Window at speed v; an absent limit model leaves the window unbounded.
template <typename Scalar>
constexpr AccelWindow<Scalar> accel_window(Scalar v, const std::optional<LimitModel<Scalar>>& lim) {
  if (!lim) return {};
  return {decel_bound(v, *lim), accel_bound(v, *lim)};
}

}  // namespace accsim
