#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "plcsynth/channel.hpp"

namespace plcsynth {

// Average channel gain 10 log10(mean |H|^2), dB.
double acg(std::span<const Complex> cfr);

// RMS delay spread (s) of the power delay profile obtained by an n_freq-point
// inverse DFT (no window), tap spacing 1 / (n_freq f_step). Taps in the upper
// half of the circular delay axis are read as negative delays, so leakage
// that wraps around the window is not weighted as a 1 / f_step delay.
double rms_ds(std::span<const Complex> cfr, double f_step_hz);

struct DelayMoments {
  double mean_s = 0.0;
  double rms_s = 0.0;
};
// Mean delay and RMS spread of the same power delay profile.
DelayMoments delay_moments(std::span<const Complex> cfr, double f_step_hz);

// Per-lag-normalized frequency autocorrelation R(d) = mean_n H_n conj(H_{n+d}).
std::vector<Complex> frequency_autocorrelation(std::span<const Complex> cfr, std::size_t max_lag);

// Coherence bandwidth (Hz): smallest lag with |R(d)| < level |R(0)|; the full
// extent (n_freq - 1) f_step when never crossed.
double coherence_bw(std::span<const Complex> cfr, double f_step_hz, double level = 0.9);

// 20 log10(s_max / s_min) of one N_R x N_T matrix, dB; +infinity if s_min = 0.
double condition_number_db(const Eigen::MatrixXcd& h);

struct ConditionNumber {
  double mean_db = 0.0;          // over the finite bins
  std::size_t n_infinite = 0;    // bins with s_min = 0
};

// Frequency-averaged condition number of one realization; requires
// min(N_R, N_T) >= 2.
ConditionNumber condition_number(const CfrArray& h, const MimoGrid& grid);

// Metrics of one realization; per-mode vectors follow the combination order.
struct RealizationMetrics {
  std::vector<double> acg_db;
  std::vector<double> rms_ds_s;
  std::vector<double> cb_hz;
  ConditionNumber kappa;
  bool has_kappa = false;
};

RealizationMetrics compute_metrics(const CfrArray& h, const MimoGrid& grid);
std::vector<RealizationMetrics> compute_metrics(const ChannelSet& set, std::size_t threads = 1);

struct MetricStatistic {
  double mean = 0.0;  // pooled over realizations and modes
  double std = 0.0;   // over realizations per mode, averaged over modes
  bool available = false;
  bool std_defined = true;  // false with a single realization
};

// Units: ACG dB, RMS-DS us, CB kHz, kappa dB, capacity Gbit/s.
struct MetricsSummary {
  std::size_t n_realizations = 0;
  MetricStatistic acg_db;
  MetricStatistic rms_ds_us;
  MetricStatistic cb_khz;
  MetricStatistic kappa_db;
  MetricStatistic capacity_gbps;
  std::size_t n_infinite_kappa = 0;
};

// per_mode[m][r] holds the value of mode m in realization r.
MetricStatistic summarize_values(const std::vector<std::vector<double>>& per_mode);

MetricsSummary summarize(const std::vector<RealizationMetrics>& metrics,
                         const std::vector<double>* capacities_bps = nullptr);

}  // namespace plcsynth
