#include "accsim/overshoot.hpp"

#include <cmath>

#include "accsim/planner.hpp"
#include "accsim/sim.hpp"

namespace accsim {

const char* to_string(OvershootQuadratic q) {
  switch (q) {
    case OvershootQuadratic::full: return "full";
    case OvershootQuadratic::absolute: return "absolute";
    case OvershootQuadratic::relative: return "relative";
  }
  return "unknown";
}

double time_to_lead_speed(double v0, double v_plateau, const LimitModeld& lim) {
  if (v_plateau < v0) throw ValidationError("v_plateau", "must be >= v0");
  if (v_plateau == v0) return 0.0;
  if (lim.beta == 0.0) return (v_plateau - v0) / lim.a0;
  const double cap = cap_speed(lim);
  if (v_plateau >= cap) throw NoSolution("plateau speed is not reachable under the acceleration bound");
  return -std::log((v_plateau - cap) / (v0 - cap)) / lim.beta;
}

double max_spacing_at_t1(const LeadProfiled& lead, double v0, const LimitModeld& lim, double t0, double t1) {
  if (!(t1 >= t0)) throw ValidationError("t1", "must be >= t0");
  return lead_distance(lead, t0, t1) - max_accel_distance(v0, lim, t1 - t0);
}

std::optional<OvershootSolution> overshoot_speed(double s_t1, double v_plateau, const AccParamsd& params,
                                                 const LimitModeld& lim, OvershootQuadratic quadratic) {
  const double k = gain_at(v_plateau, params);
  const double a_star = accel_bound(v_plateau, lim);
  const double excess = s_t1 - equilibrium_spacing(v_plateau, params);
  if (excess < 0.0) return std::nullopt;

  // a dT^2 + b dT - c = 0, positive root
  const double a = 0.5 * k * a_star;
  double b = 0.0;
  switch (quadratic) {
    case OvershootQuadratic::full: b = a_star + k * v_plateau; break;
    case OvershootQuadratic::absolute: b = k * v_plateau; break;
    case OvershootQuadratic::relative: b = a_star; break;
  }
  const double c = k * excess;
  const double disc = b * b + 4.0 * a * c;
  if (disc < 0.0) return std::nullopt;
  const double denom = b + std::sqrt(disc);
  const double dT = denom > 0.0 ? 2.0 * c / denom : 0.0;

  OvershootSolution sol;
  sol.s_t1 = s_t1;
  sol.dT = dT;
  sol.v_os = v_plateau + dT * a_star;
  return sol;
}

OvershootSolution predict_overshoot(const LeadProfiled& lead, const AccParamsd& params, const LimitModeld& lim,
                                    OvershootQuadratic quadratic) {
  lead.validate();
  if (lead.kind != LeadKind::ramp || !(lead.v_final > lead.v0))
    throw ValidationError("lead", "overshoot prediction needs an upward ramp lead");
  const double v0 = lead.v0;
  const double t1 = time_to_lead_speed(v0, lead.v_final, lim);
  const double s0 = equilibrium_spacing(v0, params);
  const double s_t1 = s0 + max_spacing_at_t1(lead, v0, lim, lead.t_start, lead.t_start + t1);
  auto sol = overshoot_speed(s_t1, lead.v_final, params, lim, quadratic);
  if (!sol) throw NoSolution("no excess spacing at t1; the follower does not overshoot");
  sol->t1 = t1;
  return *sol;
}

}  // namespace accsim
