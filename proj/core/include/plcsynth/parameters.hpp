#pragma once

#include <array>
#include <cstdint>
#include <numbers>

#include "plcsynth/grid.hpp"

namespace plcsynth {

// Converts phase in radians to the imaginary part of H_dB: K = 20 log10(e).
inline constexpr double kPhaseToDb = 20.0 * std::numbers::log10e;

// Straight line in frequency with the slope expressed per GHz.
struct LinearProfile {
  double slope_db_per_ghz = 0.0;
  double intercept_db = 0.0;

  double at(double f_hz) const { return intercept_db + slope_db_per_ghz * f_hz * 1e-9; }
  bool operator==(const LinearProfile&) const = default;
};

// Coefficients of y = a f^b + c (power) or y = a e^{b f} + c (exponential),
// with f in Hz.
struct CurveCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double power(double f_hz) const;
  double exponential(double f_hz) const;
  bool operator==(const CurveCoefficients&) const = default;
};

struct GevParameters {
  double shape = 0.0;     // xi
  double location = 0.0;  // rad/Hz
  double scale = 1.0;     // rad/Hz, > 0
  bool operator==(const GevParameters&) const = default;
};

// The compact synthetic model: three amplitude lines, two anti-diagonal power
// fits, the GEV law of the negated unwrapped-phase slope, plus the optional
// exponential tail for common-mode anti-diagonals.
struct ModelParameters {
  LinearProfile mu;
  LinearProfile sigma_nocm;
  LinearProfile sigma_cm;
  CurveCoefficients antidiag_nocm;
  CurveCoefficients antidiag_cm_power;
  CurveCoefficients antidiag_cm_exp;
  double cm_exp_threshold_hz = 40e6;
  GevParameters gev;

  // Coefficients fitted on the in-home 2x3 measurement database.
  static ModelParameters published();

  // Throws ParameterError if anything is non-finite or the GEV scale is not positive.
  void validate() const;

  // The 15 core scalars (12 amplitude + 3 phase), in declaration order.
  std::array<double, 15> core() const;
  // The 3 optional exponential-refinement scalars.
  std::array<double, 3> refinement() const {
    return {antidiag_cm_exp.a, antidiag_cm_exp.b, antidiag_cm_exp.c};
  }

  // Hash of every field that shapes the amplitude covariance.
  std::uint64_t covariance_hash(bool exp_refinement) const;

  bool operator==(const ModelParameters&) const = default;
};

// Mean amplitude (dB) at f; identical for every mode combination.
double mu_profile(const ModelParameters& params, double f_hz);
// Amplitude standard deviation (dB); the CM line applies to CM receive ports.
double sigma_profile(const ModelParameters& params, double f_hz, const ModeCombination& combo);

}  // namespace plcsynth
