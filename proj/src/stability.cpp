#include "accsim/stability.hpp"

namespace accsim {

const char* to_string(SsVerdict v) {
  switch (v) {
    case SsVerdict::string_stable: return "string_stable";
    case SsVerdict::marginal: return "marginal";
    case SsVerdict::unstable: return "unstable";
  }
  return "unknown";
}

Eigen::ArrayXd frequency_grid(double w_min, double w_max, Eigen::Index n) {
  if (!(w_min > 0) || !(w_max > w_min) || n < 2) throw ValidationError("omega_grid", "need 0 < w_min < w_max, n >= 2");
  return Eigen::ArrayXd::LinSpaced(n, std::log10(w_min), std::log10(w_max)).unaryExpr([](double e) {
    return std::pow(10.0, e);
  });
}

StabilityReport analyze_ss(double k_v, double tau, const Eigen::ArrayXd& omegas) {
  if (!(k_v > 0)) throw ValidationError("k_v", "must be > 0");
  if (!(tau > 0)) throw ValidationError("tau", "must be > 0");
  StabilityReport report;
  report.verdict = ss_condition(k_v, tau);
  report.k_tau = k_v * tau;
  const Eigen::ArrayXd mag = tf_magnitude(k_v, tau, omegas);
  report.gains.reserve(static_cast<std::size_t>(omegas.size()));
  for (Eigen::Index i = 0; i < omegas.size(); ++i) report.gains.push_back({omegas[i], mag[i]});
  return report;
}

DampeningReport dampening_verdict(std::span<const SineComponent<double>> components, double k_v, double tau) {
  DampeningReport report;
  report.verdict = ss_condition(k_v, tau);
  report.dampens = true;
  for (const auto& c : components) {
    if (!(c.amplitude > 0)) throw ValidationError("components.M", "must be > 0");
    const double g = tf_magnitude(k_v, tau, c.omega);
    report.components.push_back({c.omega, g});
    // the marginal case is all-pass; allow rounding in the unit gain
    if (g > 1.0 + 1e-12) report.dampens = false;
  }
  return report;
}

}  // namespace accsim
