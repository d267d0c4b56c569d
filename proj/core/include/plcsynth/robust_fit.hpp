#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "plcsynth/parameters.hpp"

namespace plcsynth {

struct FitDiagnostics {
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> estimates;
  std::vector<double> standard_errors;
  std::string note;
};

struct LineFit {
  double slope = 0.0;      // per unit of x
  double intercept = 0.0;  // at x = 0
  FitDiagnostics diagnostics;
};

struct RobustFitOptions {
  double tuning = 4.685;
  double mad_scale = 1.4826;
  double weight_tolerance = 1e-8;
  std::size_t max_iterations = 50;
};

// Ordinary least squares line. Throws NumericalError for constant x.
LineFit least_squares_line(std::span<const double> x, std::span<const double> y);

// Iteratively reweighted least squares with Tukey bisquare weights; residuals
// are scaled by mad_scale * MAD before applying the tuning constant.
LineFit robust_line(std::span<const double> x, std::span<const double> y,
                    const RobustFitOptions& options = {});

// robust_line on (f in Hz, y in dB), reported with the slope in dB/GHz.
LinearProfile robust_linear_fit(std::span<const double> f_hz, std::span<const double> y_db,
                                FitDiagnostics* diagnostics = nullptr,
                                const RobustFitOptions& options = {});

double median(std::vector<double> values);

}  // namespace plcsynth
