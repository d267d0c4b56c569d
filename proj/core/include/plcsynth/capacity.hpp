#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "plcsynth/channel.hpp"

namespace plcsynth {

// Noise power spectral density in dBm/Hz: either a * exp(b f) + c, or a
// tabulated profile interpolated linearly in dB (held flat outside the table).
struct NoisePsd {
  enum class Kind { exponential, table };
  Kind kind = Kind::exponential;
  double a = 45.0;
  double b = -5e-8;  // 1/Hz
  double c = -150.0;
  std::vector<std::pair<double, double>> table;  // (f Hz, dBm/Hz)

  double at(double f_hz) const;
  void validate() const;
};

// Colored, port-correlated Gaussian noise at the receive ports.
struct NoiseModel {
  // One profile shared by every port, or one per entry of port_labels.
  std::vector<NoisePsd> port_psd{NoisePsd{}};
  // Labels of the rows/columns of rx_correlation; empty means identity.
  std::vector<std::string> port_labels;
  Eigen::MatrixXd rx_correlation;

  void validate() const;
  // Correlation restricted to the given receive ports.
  Eigen::MatrixXd correlation_for(const std::vector<std::string>& rx) const;
  double psd_for(const std::string& rx, double f_hz) const;
};

// Piecewise-constant transmit PSD limit; the level of the last breakpoint at
// or below f applies.
struct PsdMask {
  std::vector<std::pair<double, double>> breakpoints{{0.0, -55.0}, {30e6, -85.0}};

  double level_dbm_hz(double f_hz) const;
  void validate() const;
};

// Spatial water-filling of `budget` over channels with gains g_k = lambda_k^2.
std::vector<double> waterfill(const std::vector<double>& gains, double budget);

// Achievable rate (bit/s) of one realization: per bin, whiten by the noise
// covariance, SVD, water-fill the mask power over the spatial eigenmodes and
// sum Delta f log2(1 + p_k lambda_k^2).
double capacity_one(const CfrArray& h, const MimoGrid& grid, const NoiseModel& noise,
                    const PsdMask& mask);

struct CapacityResult {
  std::vector<double> per_realization_bps;
  // (rate, P[C >= rate]) sorted by rate; probabilities run from 1 down to 1/n.
  std::vector<std::pair<double, double>> ccdf;
};

CapacityResult capacity_ccdf(const ChannelSet& set, const NoiseModel& noise, const PsdMask& mask,
                             std::size_t threads = 1);

std::vector<std::pair<double, double>> empirical_ccdf(std::vector<double> values);

}  // namespace plcsynth
