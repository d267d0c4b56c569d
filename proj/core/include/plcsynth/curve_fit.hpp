#pragma once

#include <span>

#include "plcsynth/covariance.hpp"
#include "plcsynth/parameters.hpp"
#include "plcsynth/robust_fit.hpp"

namespace plcsynth {

struct CurveFit {
  CurveCoefficients coefficients;
  FitDiagnostics diagnostics;
};

struct CurveFitOptions {
  std::size_t max_iterations = 200;
  double step_tolerance = 1e-10;
};

// Levenberg-Marquardt fit of y = a f^b + c (f in Hz, f > 0). Starts from a
// log-log line through (f, y - min y), then cross-checks against a coarse scan
// over b with (a, c) solved linearly, keeping the lower residual.
CurveFit fit_power_curve(std::span<const double> f_hz, std::span<const double> y,
                         const CurveFitOptions& options = {});

// Levenberg-Marquardt fit of y = a e^{b f} + c, initialized by a scan over b.
CurveFit fit_exponential_curve(std::span<const double> f_hz, std::span<const double> y,
                               const CurveFitOptions& options = {});

struct PowerFitWindow {
  double lag_cap_hz = 40e6;
  // The fitted curve is min(a f^b + c, saturation_level), the same clamp the
  // generator applies to the anti-diagonal profile.
  double saturation_level = 1.0;
};

// Power fit of an anti-diagonal profile over lags in (0, lag_cap].
CurveFit fit_power(const AntiDiagonalProfile& profile, const PowerFitWindow& window = {},
                   const CurveFitOptions& options = {});

// Exponential fit of (profile - power_part) over lags >= lag_floor, shifted so
// the residual at the floor is zero.
CurveFit fit_exponential_tail(const AntiDiagonalProfile& profile, double lag_floor_hz,
                              const CurveCoefficients& power_part,
                              const CurveFitOptions& options = {});

}  // namespace plcsynth
