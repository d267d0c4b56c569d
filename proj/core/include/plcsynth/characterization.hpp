#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "plcsynth/channel.hpp"
#include "plcsynth/covariance.hpp"
#include "plcsynth/curve_fit.hpp"
#include "plcsynth/generator.hpp"
#include "plcsynth/parameters.hpp"
#include "plcsynth/robust_fit.hpp"

namespace plcsynth {

// Per-frequency amplitude statistics (dB) of one mode combination.
struct ProfileEstimate {
  ModeCombination combo;
  std::vector<double> mean;
  std::vector<double> std;  // unbiased, n - 1
};

// Throws InsufficientData for fewer than 2 realizations.
std::vector<ProfileEstimate> estimate_profiles(const PolarSet& polar);
std::vector<ProfileEstimate> estimate_profiles(const ChannelSet& set);

// Pearson correlation matrices of the reshaped A_dB and phase vectors across
// realizations, plus the per-coordinate moments they were normalized with.
struct EmpiricalCorrelation {
  BlockCovariance amplitude;
  BlockCovariance phase;
  Eigen::VectorXd amplitude_mean;
  Eigen::VectorXd amplitude_std;
  Eigen::VectorXd phase_std;
};

// Throws NumericalError naming the coordinate if any variance is zero.
EmpiricalCorrelation empirical_block_R(const ChannelSet& set);

// Normalized amplitude-phase cross-correlation, entry (p, q) = corr(A_p, phi_q).
Eigen::MatrixXd amplitude_phase_cross_correlation(const ChannelSet& set);

// Full matrices for the not-fully-synthetic generator.
EmpiricalMatrices empirical_matrices(const ChannelSet& set);

// Mean of each diagonal stripe: r(d) = mean_k block(k, k + d) over both stripes.
AntiDiagonalProfile antidiag_average(const Eigen::MatrixXd& block, double lag_step_hz = 1.0);

// Unwraps along frequency, adding -+2 pi where the jump is >= pi in magnitude.
// Returns the number of corrections applied.
std::size_t unwrap_phase(std::span<const double> wrapped, std::vector<double>& unwrapped);

// Negated least-squares slope (rad/Hz) of each unwrapped (realization, mode)
// profile, realization-major then combination order.
std::vector<double> extract_phase_slopes(const ChannelSet& set, bool robust = false);

struct GevFit {
  GevParameters parameters;
  FitDiagnostics diagnostics;
};

// Probability-weighted-moment estimate used to start the likelihood search.
GevParameters gev_pwm_estimate(std::span<const double> samples);

// Maximum-likelihood GEV fit. Needs at least 50 samples; a degenerate sample
// (zero spread) returns scale 0 with converged = false.
GevFit fit_gev(std::span<const double> samples);

struct CharacterizationOptions {
  PowerFitWindow power_window{};
  double exp_lag_floor_hz = 40e6;
  bool robust_phase_slope = false;
  bool fit_exponential_tail = true;
};

struct CharacterizationResult {
  ModelParameters params;
  std::size_t n_realizations = 0;
  std::vector<ProfileEstimate> profiles;
  AntiDiagonalProfile antidiag_nocm;
  AntiDiagonalProfile antidiag_cm;
  bool has_nocm = false;
  bool has_cm = false;
  FitDiagnostics mu_fit;
  FitDiagnostics sigma_nocm_fit;
  FitDiagnostics sigma_cm_fit;
  FitDiagnostics power_nocm_fit;
  FitDiagnostics power_cm_fit;
  FitDiagnostics exp_cm_fit;
  FitDiagnostics gev_fit;
};

// Recovers the compact model from a channel set. Missing families (no CM
// receive port, say) keep the published values and are flagged in the
// corresponding diagnostics note.
CharacterizationResult characterize(const ChannelSet& set, const CharacterizationOptions& options = {});

}  // namespace plcsynth
