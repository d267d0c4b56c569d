#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include <Eigen/Dense>

#include "plcsynth/channel.hpp"
#include "plcsynth/covariance.hpp"
#include "plcsynth/parameters.hpp"
#include "plcsynth/rng.hpp"

namespace plcsynth {

enum class GenerationMode { synthetic, not_fully_synthetic };

struct GeneratorConfig {
  std::size_t n_realizations = 1;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::mimo2x3;
  GenerationMode mode = GenerationMode::synthetic;
  bool exponential_cm_refinement = false;
  std::size_t decimation = 1;
  // Worker cap; results do not depend on it.
  std::size_t threads = 1;
  // Directory for the covariance square-root cache, if any.
  std::optional<std::filesystem::path> cache_dir;

  void validate() const;
};

// Full-matrix inputs of the not-fully-synthetic path, reshape-ordered.
struct EmpiricalMatrices {
  MimoGrid grid;
  Eigen::MatrixXd amplitude_covariance;  // Q_A
  Eigen::MatrixXd phase_correlation;     // R_phi, unit diagonal
  Eigen::VectorXd amplitude_mean;        // mu_A

  void validate() const;
};

// A_dB = S N + mu with N i.i.d. standard normal drawn from `rng`.
Eigen::VectorXd gen_amplitudes(const Eigen::MatrixXd& s, const Eigen::VectorXd& mu,
                               RandomStream& rng);

// Negated unwrapped-phase slope (rad/Hz) drawn from the GEV law.
double sample_phase_slope(const GevParameters& gev, RandomStream& rng);

// Wrapped phase of the linear profile phi_u(f) = -slope f, copied to every mode.
RealArray phases_from_slope(const MimoGrid& grid, double slope);

// One realization's phases: a GEV slope shared by all modes.
RealArray gen_phases(const MimoGrid& grid, const GevParameters& gev, RandomStream& rng);

// Rank-correlation adjustment of the Gaussian copula: 2 sin(pi rho / 6).
double copula_gaussian_correlation(double rho_target);

// Grid generated for `config` from the default 2x3 layout.
MimoGrid generation_grid(const GeneratorConfig& config);

// Synthetic channel set: correlated log-normal amplitudes and GEV-slope
// linear phases, H = 10^(A_dB / 20) e^{i phi}.
ChannelSet generate(const GeneratorConfig& config, const ModelParameters& params);
// Same, with a precomputed amplitude covariance root for `grid`.
ChannelSet generate(const GeneratorConfig& config, const ModelParameters& params,
                    const MimoGrid& grid, const Eigen::MatrixXd& amplitude_root);

// Amplitudes from the empirical covariance, uniform phases correlated through
// a Gaussian copula. Non-PSD matrices are repaired as in psd_sqrt; the reports
// are returned through the optional pointers.
ChannelSet generate_copula(const GeneratorConfig& config, const EmpiricalMatrices& matrices,
                           PsdRepairReport* amplitude_report = nullptr,
                           PsdRepairReport* phase_report = nullptr);

}  // namespace plcsynth
