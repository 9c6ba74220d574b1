#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "accsim/core.hpp"

namespace accsim {

/// One recorded drive: uniformly sampled time, speed and acceleration.
struct Drive {
  std::vector<double> t, v, a;
};

struct TippingPoint {
  double v{};
  double a{};
};

enum class BoundSide { accel, decel };

/// Sustained extreme acceleration of each drive: the maximum (accel side) or
/// minimum (decel side) of a centered moving average over `window_s`,
/// paired with the speed at the window center. Drives with no positive
/// (resp. negative) episode are skipped and their indices appended to
/// `skipped` when given.
std::vector<TippingPoint> extract_tipping_points(std::span<const Drive> drives, double window_s = 0.5,
                                                 BoundSide side = BoundSide::accel,
                                                 std::vector<std::size_t>* skipped = nullptr);

/// Least-squares line through tipping points, reported in the bound's own
/// parameters with the reference speed held fixed:
///   accel: a   = intercept + (v_c - v) * slope     (a0, beta)
///   decel: |a| = intercept + (v_c - v) * slope     (d0, theta)
struct LinearBoundFit {
  double intercept{};
  double slope{};
  double v_c{};
  double rms{};
  std::size_t n_points{};
};

LinearBoundFit fit_linear_limit(std::span<const TippingPoint> points, double v_c = 40.0,
                                BoundSide side = BoundSide::accel);

LimitModeld to_limit_model(const LinearBoundFit& accel, const LinearBoundFit& decel);

/// Synthetic drive: `lead_in_s` at constant v0, then `duration_s` riding the
/// chosen bound of `lim`, sampled every dt. Gaussian noise of sd `noise_sd`
/// is added to the recorded acceleration only.
Drive synthetic_drive(const LimitModeld& lim, double v0, BoundSide side, double duration_s, double dt = 0.01,
                      double lead_in_s = 2.0, double noise_sd = 0.0, std::uint64_t seed = 0);

}  // namespace accsim
