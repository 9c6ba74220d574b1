#pragma once

#include <optional>
#include <stdexcept>

#include "accsim/actuation.hpp"
#include "accsim/core.hpp"

namespace accsim {

/// No finite time solves the requested speed crossing.
class NoSolution : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Which quadratic determines dT, the time from t1 (follower back at the
/// plateau speed) until the setpoint meets the falling target.
///
/// With a* frozen at the plateau and k the plateau gain:
///   full:     (k a*/2) dT^2 + (a* + k v_p) dT = k (s(t1) - tau v_p - delta)
///   absolute: (k a*/2) dT^2 +       k v_p dT  = k (s(t1) - tau v_p - delta)
///   relative: (k a*/2) dT^2 +          a* dT  = k (s(t1) - tau v_p - delta)
///
/// `relative` (the default) lets the target fall at k (v_ego - v_lead): only
/// the speed excess over the plateau closes the gap. It tracks simulated
/// peaks; the other two keep the absolute-speed reading of the gap closure.
enum class OvershootQuadratic { full, absolute, relative };

const char* to_string(OvershootQuadratic q);

struct OvershootSolution {
  double t1{};    // from the start of saturation to speed equality with the plateau
  double s_t1{};  // spacing at t1
  double dT{};    // t1 -> setpoint/target crossing
  double v_os{};  // peak follower speed
};

/// Time for a follower at its acceleration bound to go from v0 to
/// v_plateau. Throws NoSolution when the plateau is at or above the cap speed.
double time_to_lead_speed(double v0, double v_plateau, const LimitModeld& lim);

/// Spacing gained over [t0, t1] while the follower (starting at v0 at t0)
/// rides its acceleration bound behind `lead`.
double max_spacing_at_t1(const LeadProfiled& lead, double v0, const LimitModeld& lim, double t0, double t1);

/// Peak speed after the follower reaches the plateau with spacing s_t1.
/// Returns nullopt when s_t1 is below the plateau equilibrium spacing (no
/// excess gap to close, hence no overshoot).
std::optional<OvershootSolution> overshoot_speed(double s_t1, double v_plateau, const AccParamsd& params,
                                                 const LimitModeld& lim,
                                                 OvershootQuadratic quadratic = OvershootQuadratic::relative);

/// End-to-end prediction for a ramp lead starting from equilibrium at v0:
/// t1 from the bound trajectory, s(t1) from the spacing integral, then the
/// overshoot quadratic. Saturation is assumed to start at the ramp start.
OvershootSolution predict_overshoot(const LeadProfiled& ramp_lead, const AccParamsd& params, const LimitModeld& lim,
                                    OvershootQuadratic quadratic = OvershootQuadratic::relative);

}  // namespace accsim
