#include <algorithm>
#include <cmath>

#include "accsim/sim.hpp"

namespace accsim {
namespace {

struct Ramp {
  double v0, v1, t0, rate;  // rate is signed
  double t1() const { return t0 + (v1 - v0) / rate; }
};

Ramp ramp_of(const LeadProfiled& p) {
  const double v1 = p.kind == LeadKind::stop_at_light ? 0.0 : p.v_final;
  const double mag = std::abs(p.a_lead);
  return {p.v0, v1, p.t_start, v1 >= p.v0 ? mag : -mag};
}

double raw_sine(const LeadProfiled& p, double t) {
  double v = p.v0;
  if (t >= p.t_start && t <= p.t_end)
    for (const auto& c : p.components) v += c.amplitude * std::sin(c.omega * (t - p.t_start));
  return v;
}

// distance over [a, b] on one ramp, split at its knots
double ramp_distance(const Ramp& r, double a, double b) {
  if (r.v0 == r.v1) return r.v0 * (b - a);
  auto pos = [&](double t) {
    if (t <= r.t0) return r.v0 * t;
    const double te = r.t1();
    const double ramp_end = std::min(t, te);
    const double d = r.v0 * r.t0 + r.v0 * (ramp_end - r.t0) + 0.5 * r.rate * (ramp_end - r.t0) * (ramp_end - r.t0);
    return t > te ? d + r.v1 * (t - te) : d;
  };
  return pos(b) - pos(a);
}

}  // namespace

LeadSample generate_lead(const LeadProfiled& p, double t) {
  switch (p.kind) {
    case LeadKind::constant:
      return {p.v0, 0.0};
    case LeadKind::sine_sum: {
      if (t < p.t_start || t > p.t_end) return {p.v0, 0.0};
      double v = p.v0;
      double a = 0.0;
      for (const auto& c : p.components) {
        const double ph = c.omega * (t - p.t_start);
        v += c.amplitude * std::sin(ph);
        a += c.amplitude * c.omega * std::cos(ph);
      }
      if (v <= 0.0) return {0.0, 0.0};
      return {v, a};
    }
    case LeadKind::ramp:
    case LeadKind::emergency_brake:
    case LeadKind::stop_at_light: {
      const Ramp r = ramp_of(p);
      if (r.v0 == r.v1 || t < r.t0) return {r.v0, 0.0};
      if (t >= r.t1()) return {r.v1, 0.0};
      return {r.v0 + r.rate * (t - r.t0), r.rate};
    }
  }
  return {p.v0, 0.0};
}

double lead_distance(const LeadProfiled& p, double t0, double t1) {
  if (t1 <= t0) return 0.0;
  switch (p.kind) {
    case LeadKind::constant:
      return p.v0 * (t1 - t0);
    case LeadKind::ramp:
    case LeadKind::emergency_brake:
    case LeadKind::stop_at_light:
      return ramp_distance(ramp_of(p), t0, t1);
    case LeadKind::sine_sum: {
      double reach = 0.0;
      for (const auto& c : p.components) reach += c.amplitude;
      if (p.v0 - reach > 0.0) {
        // never floored: integrate each sinusoid over its active window
        double d = p.v0 * (t1 - t0);
        const double a = std::max(t0, p.t_start);
        const double b = std::min(t1, p.t_end);
        if (b > a)
          for (const auto& c : p.components)
            d += c.amplitude / c.omega *
                 (std::cos(c.omega * (a - p.t_start)) - std::cos(c.omega * (b - p.t_start)));
        return d;
      }
      // composite Simpson at <= 1e-3 s
      const auto n = std::max<long>(2, 2 * static_cast<long>(std::ceil((t1 - t0) / 2e-3)));
      const double h = (t1 - t0) / static_cast<double>(n);
      auto f = [&](double t) { return std::max(0.0, raw_sine(p, t)); };
      double sum = f(t0) + f(t1);
      for (long i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(t0 + h * static_cast<double>(i));
      return sum * h / 3.0;
    }
  }
  return 0.0;
}

}  // namespace accsim
