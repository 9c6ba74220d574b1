#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "accsim/core.hpp"

namespace accsim {

enum class SsVerdict { string_stable, marginal, unstable };

const char* to_string(SsVerdict v);

/// String-stability verdict of the unconstrained factory ACC: stable iff
/// k_v * tau < 2, marginal when equal to within 1e-12 relative.
template <typename Scalar>
SsVerdict ss_condition(Scalar k_v, Scalar tau) {
  const Scalar kt = k_v * tau;
  if (std::abs(kt - Scalar(2)) <= Scalar(1e-12) * Scalar(2)) return SsVerdict::marginal;
  return kt < Scalar(2) ? SsVerdict::string_stable : SsVerdict::unstable;
}

/// Speed-to-speed amplitude ratio of one follower,
///
///   |G(jw)|^2 = (k^2 + (1 - k tau)^2 w^2) / (k^2 + w^2),
///
/// from G(s) = ((1 - k tau) s + k) / (s + k).
template <typename Scalar>
Scalar tf_magnitude(Scalar k_v, Scalar tau, Scalar omega) {
  const Scalar c = Scalar(1) - k_v * tau;
  const Scalar k2 = k_v * k_v;
  const Scalar w2 = omega * omega;
  return std::sqrt((k2 + c * c * w2) / (k2 + w2));
}

/// Array form of tf_magnitude, evaluated coefficient-wise.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> tf_magnitude(
    typename Derived::Scalar k_v, typename Derived::Scalar tau, const Eigen::ArrayBase<Derived>& omega) {
  using Scalar = typename Derived::Scalar;
  const Scalar c = Scalar(1) - k_v * tau;
  const Scalar k2 = k_v * k_v;
  const auto w2 = omega.square();
  return ((k2 + c * c * w2) / (k2 + w2)).sqrt();
}

/// Phase of G(jw) in radians (negative = follower lags).
template <typename Scalar>
Scalar tf_phase(Scalar k_v, Scalar tau, Scalar omega) {
  return std::atan2((Scalar(1) - k_v * tau) * omega, k_v) - std::atan2(omega, k_v);
}

/// Log-spaced frequency grid, 64 points on [0.01, 10] rad/s by default.
Eigen::ArrayXd frequency_grid(double w_min = 0.01, double w_max = 10.0, Eigen::Index n = 64);

struct GainPoint {
  double omega{};
  double magnitude{};
};

struct StabilityReport {
  SsVerdict verdict{};
  double k_tau{};
  std::vector<GainPoint> gains;
};

/// Verdict plus |G| sampled on a frequency grid.
StabilityReport analyze_ss(double k_v, double tau, const Eigen::ArrayXd& omegas = frequency_grid());

struct DampeningReport {
  bool dampens{};        // |G| <= 1 at every component frequency
  SsVerdict verdict{};   // global verdict from k_v * tau
  std::vector<GainPoint> components;
};

/// Per-component gains of a sum-of-sines lead perturbation. For the LTI
/// follower the per-component answer collapses to the single ss_condition.
DampeningReport dampening_verdict(std::span<const SineComponent<double>> components, double k_v, double tau);

/// Closed-form follower speed for lead speed v_eq + M sin(w t), starting from
/// equilibrium at t = 0 and with no actuation limits:
///
///   v(t) = [k^2 v_eq + e^{-kt} k^2 M tau w + v_eq w^2 - k^2 M tau w cos(wt)
///           + M (k^2 - k tau w^2 + w^2) sin(wt)] / (k^2 + w^2)
template <typename Scalar>
Scalar ode_response(Scalar k_v, Scalar tau, Scalar M, Scalar omega, Scalar v_eq, Scalar t) {
  const Scalar k2 = k_v * k_v;
  const Scalar w2 = omega * omega;
  const Scalar transient = std::exp(-k_v * t) * k2 * M * tau * omega;
  const Scalar num = k2 * v_eq + transient + v_eq * w2 - k2 * M * tau * omega * std::cos(omega * t) +
                     M * (k2 - k_v * tau * w2 + w2) * std::sin(omega * t);
  return num / (k2 + w2);
}

}  // namespace accsim
