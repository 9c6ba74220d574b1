#pragma once

#include <algorithm>

#include "accsim/core.hpp"

namespace accsim {

/// What the planner senses at one tick.
template <typename Scalar>
struct PlannerInput {
  Scalar s{};       // spacing to the predecessor
  Scalar v_lead{};  // predecessor speed
  Scalar v_ego{};
};

/// Scheduled gain at speed v. Rows are sorted by `v_from`; below the first
/// row the base gain `k_v` applies.
template <typename Scalar>
Scalar gain_at(Scalar v, const AccParams<Scalar>& params) {
  Scalar k = params.k_v;
  for (const auto& step : params.schedule) {
    if (v < step.v_from) break;
    k = step.k;
  }
  return k;
}

/// Factory linear ACC target speed:
///
///   v_target = v_lead + k(v_ego) * (s - tau * v_lead - delta)
///
/// clipped to [0, v_set]. The cap is the only free-flow mechanism.
template <typename Scalar>
Scalar target_speed(const PlannerInput<Scalar>& in, const AccParams<Scalar>& params) {
  const Scalar k = gain_at(in.v_ego, params);
  const Scalar raw = in.v_lead + k * (in.s - equilibrium_spacing(in.v_lead, params));
  return std::min(params.v_set, std::max(Scalar(0), raw));
}

}  // namespace accsim
