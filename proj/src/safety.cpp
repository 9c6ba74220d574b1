#include "accsim/safety.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace accsim {

std::optional<double> required_gain(double v_lead, double v_ego, double a_lead, double tau, double a_required) {
  if (!(a_required < 0.0)) throw ValidationError("a_required", "must be < 0");
  if (!(tau > 0.0)) throw ValidationError("tau", "must be > 0");
  const double denom = v_lead - v_ego - tau * a_lead;
  if (denom >= 0.0) return std::nullopt;
  return a_required / denom;
}

double required_deceleration(double v_ego, double v_lead, double s, double delta) {
  return -(v_ego * v_ego - v_lead * v_lead) / (2.0 * std::max(s - delta, kTtcEpsilon));
}

GainInterval gain_feasibility(double k_min, double tau) {
  if (!(k_min >= 0.0)) throw ValidationError("k_min", "must be >= 0");
  if (!(tau > 0.0)) throw ValidationError("tau", "must be > 0");
  const double k_max = 2.0 / tau;
  return {k_min, k_max, k_min <= k_max};
}

SafetyReport trajectory_safety(const TrajectoryLog& log, double delta) {
  if (log.ticks() == 0) throw ValidationError("log", "must be non-empty");
  constexpr double inf = std::numeric_limits<double>::infinity();
  SafetyReport r;
  r.min_spacing = inf;
  r.min_ttc = inf;
  double first_sub_delta = inf;

  for (Eigen::Index i = 1; i < log.vehicles(); ++i) {
    PairSafety p{static_cast<std::size_t>(i), inf, inf};
    for (Eigen::Index k = 0; k < log.ticks(); ++k) {
      const double s = log.spacing(k, i);
      const double closing = log.v(k, i) - log.v(k, i - 1);
      const double ttc = std::max(0.0, s / std::max(closing, kTtcEpsilon));
      p.min_spacing = std::min(p.min_spacing, s);
      p.min_ttc = std::min(p.min_ttc, ttc);
      if (s < delta && log.t[k] < first_sub_delta) {
        first_sub_delta = log.t[k];
        r.takeover_speed = log.v(k, i);
        r.takeover_time = log.t[k];
      }
    }
    r.min_spacing = std::min(r.min_spacing, p.min_spacing);
    r.min_ttc = std::min(r.min_ttc, p.min_ttc);
    r.pairs.push_back(p);
  }
  // a crash on the final step is not in the logged rows
  for (const auto& e : log.crashes) {
    auto& p = r.pairs[e.vehicle - 1];
    p.min_spacing = std::min(p.min_spacing, e.spacing);
    p.min_ttc = 0.0;
    r.min_spacing = std::min(r.min_spacing, e.spacing);
    r.min_ttc = 0.0;
  }
  r.crash = !log.crashes.empty() || r.min_spacing <= 0.0;
  return r;
}

}  // namespace accsim
