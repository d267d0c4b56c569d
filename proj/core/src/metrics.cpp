#include "plcsynth/metrics.hpp"

#include <cmath>
#include <limits>
#include <mutex>

#include <fftw3.h>

#include "plcsynth/error.hpp"
#include "plcsynth/parallel.hpp"

namespace plcsynth {

namespace {

// FFTW planning is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

double acg(std::span<const Complex> cfr) {
  if (cfr.empty()) throw InvalidInput("acg: empty response");
  double sum = 0.0;
  for (const Complex& h : cfr) {
    if (h == Complex{}) throw DegenerateChannel("acg: zero entry in the response");
    sum += std::norm(h);
  }
  return 10.0 * std::log10(sum / static_cast<double>(cfr.size()));
}

DelayMoments delay_moments(std::span<const Complex> cfr, double f_step_hz) {
  const std::size_t n = cfr.size();
  if (n < 2) throw InvalidInput("delay_moments: need at least 2 frequency bins");
  std::vector<Complex> in(cfr.begin(), cfr.end()), out(n);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                            reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  const double dt = 1.0 / (static_cast<double>(n) * f_step_hz);
  double p0 = 0.0, p1 = 0.0, p2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double p = std::norm(out[k]);
    // Upper half of the circular delay axis holds negative delays.
    const auto signed_k = k < (n + 1) / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
    const double t = signed_k * dt;
    p0 += p;
    p1 += p * t;
    p2 += p * t * t;
  }
  if (!(p0 > 0.0)) return {};
  const double m1 = p1 / p0;
  return {m1, std::sqrt(std::max(p2 / p0 - m1 * m1, 0.0))};
}

double rms_ds(std::span<const Complex> cfr, double f_step_hz) {
  return delay_moments(cfr, f_step_hz).rms_s;
}

std::vector<Complex> frequency_autocorrelation(std::span<const Complex> cfr, std::size_t max_lag) {
  const std::size_t n = cfr.size();
  max_lag = std::min(max_lag, n - 1);
  std::vector<Complex> r(max_lag + 1);
  for (std::size_t d = 0; d <= max_lag; ++d) {
    Complex sum{};
    for (std::size_t k = 0; k + d < n; ++k) sum += cfr[k] * std::conj(cfr[k + d]);
    r[d] = sum / static_cast<double>(n - d);
  }
  return r;
}

double coherence_bw(std::span<const Complex> cfr, double f_step_hz, double level) {
  const std::size_t n = cfr.size();
  if (n < 2) throw InvalidInput("coherence_bw: need at least 2 frequency bins");
  double r0 = 0.0;
  for (const Complex& h : cfr) r0 += std::norm(h);
  r0 /= static_cast<double>(n);
  const double threshold = level * r0;
  for (std::size_t d = 1; d < n; ++d) {
    Complex sum{};
    for (std::size_t k = 0; k + d < n; ++k) sum += cfr[k] * std::conj(cfr[k + d]);
    if (std::abs(sum / static_cast<double>(n - d)) < threshold) {
      return static_cast<double>(d) * f_step_hz;
    }
  }
  return static_cast<double>(n - 1) * f_step_hz;
}

double condition_number_db(const Eigen::MatrixXcd& h) {
  if (std::min(h.rows(), h.cols()) < 2) {
    throw InvalidInput("condition number needs at least a 2x2 channel matrix");
  }
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h);
  const auto& s = svd.singularValues();
  const double smax = s(0), smin = s(s.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(smax / smin);
}

ConditionNumber condition_number(const CfrArray& h, const MimoGrid& grid) {
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(grid.n_rx()), static_cast<Eigen::Index>(grid.n_tx()));
  ConditionNumber out;
  double sum = 0.0;
  std::size_t finite = 0;
  for (std::size_t n = 0; n < grid.n_freq(); ++n) {
    for (std::size_t j = 0; j < grid.n_rx(); ++j) {
      for (std::size_t i = 0; i < grid.n_tx(); ++i) {
        m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = h(j, i, n);
      }
    }
    const double k = condition_number_db(m);
    if (std::isfinite(k)) {
      sum += k;
      ++finite;
    } else {
      ++out.n_infinite;
    }
  }
  out.mean_db = finite ? sum / static_cast<double>(finite) : std::numeric_limits<double>::infinity();
  return out;
}

RealizationMetrics compute_metrics(const CfrArray& h, const MimoGrid& grid) {
  if (!h.conforms_to(grid)) throw InvalidInput("compute_metrics: realization does not match grid");
  RealizationMetrics out;
  for (const ModeCombination& combo : grid.combinations()) {
    auto cfr = h.cfr(combo.index % grid.n_rx(), combo.index / grid.n_rx());
    out.acg_db.push_back(acg(cfr));
    out.rms_ds_s.push_back(rms_ds(cfr, grid.f_step()));
    out.cb_hz.push_back(coherence_bw(cfr, grid.f_step()));
  }
  if (std::min(grid.n_rx(), grid.n_tx()) >= 2) {
    out.kappa = condition_number(h, grid);
    out.has_kappa = true;
  }
  return out;
}

std::vector<RealizationMetrics> compute_metrics(const ChannelSet& set, std::size_t threads) {
  std::vector<RealizationMetrics> out(set.size());
  parallel_chunks(set.size(), 8, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) out[r] = compute_metrics(set.realizations[r], set.grid);
  });
  return out;
}

MetricStatistic summarize_values(const std::vector<std::vector<double>>& per_mode) {
  MetricStatistic s;
  if (per_mode.empty() || per_mode.front().empty()) return s;
  s.available = true;
  double pooled = 0.0;
  std::size_t count = 0;
  double std_sum = 0.0;
  for (const auto& values : per_mode) {
    double mode_mean = 0.0;
    for (double v : values) mode_mean += v;
    pooled += mode_mean;
    count += values.size();
    mode_mean /= static_cast<double>(values.size());
    if (values.size() >= 2) {
      double ss = 0.0;
      for (double v : values) ss += (v - mode_mean) * (v - mode_mean);
      std_sum += std::sqrt(ss / static_cast<double>(values.size() - 1));
    } else {
      s.std_defined = false;
    }
  }
  s.mean = pooled / static_cast<double>(count);
  s.std = s.std_defined ? std_sum / static_cast<double>(per_mode.size()) : 0.0;
  return s;
}

MetricsSummary summarize(const std::vector<RealizationMetrics>& metrics,
                         const std::vector<double>* capacities_bps) {
  MetricsSummary out;
  out.n_realizations = metrics.size();
  if (metrics.empty()) return out;
  const std::size_t n_modes = metrics.front().acg_db.size();
  std::vector<std::vector<double>> acg_v(n_modes), ds_v(n_modes), cb_v(n_modes);
  std::vector<std::vector<double>> kappa_v(1);
  for (const RealizationMetrics& m : metrics) {
    if (m.acg_db.size() != n_modes) throw InvalidInput("summarize: inconsistent mode count");
    for (std::size_t k = 0; k < n_modes; ++k) {
      acg_v[k].push_back(m.acg_db[k]);
      ds_v[k].push_back(m.rms_ds_s[k] * 1e6);
      cb_v[k].push_back(m.cb_hz[k] * 1e-3);
    }
    if (m.has_kappa) {
      out.n_infinite_kappa += m.kappa.n_infinite;
      if (std::isfinite(m.kappa.mean_db)) kappa_v[0].push_back(m.kappa.mean_db);
    }
  }
  out.acg_db = summarize_values(acg_v);
  out.rms_ds_us = summarize_values(ds_v);
  out.cb_khz = summarize_values(cb_v);
  if (!kappa_v[0].empty()) out.kappa_db = summarize_values(kappa_v);
  if (capacities_bps && !capacities_bps->empty()) {
    std::vector<std::vector<double>> c(1);
    for (double v : *capacities_bps) c[0].push_back(v * 1e-9);
    out.capacity_gbps = summarize_values(c);
  }
  return out;
}

}  // namespace plcsynth
