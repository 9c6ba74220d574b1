#include "accsim/fitlimits.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "accsim/actuation.hpp"

namespace accsim {

std::vector<TippingPoint> extract_tipping_points(std::span<const Drive> drives, double window_s, BoundSide side,
                                                 std::vector<std::size_t>* skipped) {
  if (!(window_s > 0)) throw ValidationError("window_s", "must be > 0");
  const double sign = side == BoundSide::accel ? 1.0 : -1.0;
  std::vector<TippingPoint> points;

  for (std::size_t d = 0; d < drives.size(); ++d) {
    const Drive& drive = drives[d];
    const std::size_t n = drive.t.size();
    if (drive.v.size() != n || drive.a.size() != n) throw ValidationError("drive", "t, v, a lengths differ");
    if (n < 2) {
      if (skipped) skipped->push_back(d);
      continue;
    }
    const double dt = (drive.t.back() - drive.t.front()) / static_cast<double>(n - 1);
    const auto w = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(window_s / dt)), 1, n);

    // running sum over a sliding window, tracked on the mirrored signal
    double sum = 0.0;
    for (std::size_t i = 0; i < w; ++i) sum += sign * drive.a[i];
    double best = sum;
    std::size_t best_start = 0;
    for (std::size_t s = 1; s + w <= n; ++s) {
      sum += sign * (drive.a[s + w - 1] - drive.a[s - 1]);
      if (sum > best) {
        best = sum;
        best_start = s;
      }
    }
    best /= static_cast<double>(w);
    if (!(best > 0.0)) {
      if (skipped) skipped->push_back(d);
      continue;
    }
    // center of the window; even widths average the two middle samples
    const std::size_t lo = best_start + (w - 1) / 2;
    const std::size_t hi = best_start + w / 2;
    points.push_back({0.5 * (drive.v[lo] + drive.v[hi]), sign * best});
  }
  return points;
}

LinearBoundFit fit_linear_limit(std::span<const TippingPoint> points, double v_c, BoundSide side) {
  if (!(v_c > 0)) throw ValidationError("v_c", "must be > 0");
  std::vector<double> speeds;
  for (const auto& p : points) speeds.push_back(p.v);
  std::sort(speeds.begin(), speeds.end());
  if (std::unique(speeds.begin(), speeds.end()) - speeds.begin() < 2)
    throw ValidationError("points", "underdetermined: need at least 2 distinct speeds");

  const double sign = side == BoundSide::accel ? 1.0 : -1.0;
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = points[static_cast<std::size_t>(i)].v;
    y[i] = sign * points[static_cast<std::size_t>(i)].a;
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);

  // y = c0 + c1 v = (intercept + slope v_c) - slope v
  LinearBoundFit fit;
  fit.slope = -c[1];
  fit.intercept = c[0] - fit.slope * v_c;
  fit.v_c = v_c;
  fit.rms = std::sqrt((A * c - y).squaredNorm() / static_cast<double>(n));
  fit.n_points = points.size();
  return fit;
}

LimitModeld to_limit_model(const LinearBoundFit& accel, const LinearBoundFit& decel) {
  if (accel.v_c != decel.v_c) throw ValidationError("v_c", "accel and decel fits use different reference speeds");
  LimitModeld lim{accel.intercept, accel.slope, accel.v_c, decel.intercept, decel.slope};
  lim.validate();
  return lim;
}

Drive synthetic_drive(const LimitModeld& lim, double v0, BoundSide side, double duration_s, double dt,
                      double lead_in_s, double noise_sd, std::uint64_t seed) {
  if (!(dt > 0)) throw ValidationError("dt", "must be > 0");
  Drive d;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, noise_sd > 0 ? noise_sd : 1.0);
  const auto n_in = static_cast<std::size_t>(std::lround(lead_in_s / dt));
  const auto n_on = static_cast<std::size_t>(std::lround(duration_s / dt));
  for (std::size_t i = 0; i < n_in + n_on; ++i) {
    const double t = static_cast<double>(i) * dt;
    double v = v0;
    double a = 0.0;
    if (i >= n_in) {
      const double elapsed = static_cast<double>(i - n_in) * dt;
      if (side == BoundSide::accel) {
        v = max_accel_speed(v0, lim, elapsed);
        a = accel_bound(v, lim);
      } else {
        if (lim.theta == 0.0) {
          v = v0 - lim.d0 * elapsed;
        } else {
          // dv/dt = theta (v - w), w = v_c + d0 / theta
          const double w = lim.v_c + lim.d0 / lim.theta;
          v = (v0 - w) * std::exp(lim.theta * elapsed) + w;
        }
        v = std::max(0.0, v);
        a = v > 0.0 ? decel_bound(v, lim) : 0.0;
      }
    }
    if (noise_sd > 0) a += noise(gen);
    d.t.push_back(t);
    d.v.push_back(v);
    d.a.push_back(a);
  }
  return d;
}

}  // namespace accsim
