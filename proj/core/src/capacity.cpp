#include "plcsynth/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "plcsynth/error.hpp"
#include "plcsynth/parallel.hpp"

namespace plcsynth {

double NoisePsd::at(double f_hz) const {
  if (kind == Kind::exponential) return a * std::exp(b * f_hz) + c;
  if (f_hz <= table.front().first) return table.front().second;
  if (f_hz >= table.back().first) return table.back().second;
  auto hi = std::upper_bound(table.begin(), table.end(), f_hz,
                             [](double f, const auto& p) { return f < p.first; });
  auto lo = hi - 1;
  const double t = (f_hz - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

void NoisePsd::validate() const {
  if (kind == Kind::exponential) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
      throw ParameterError("noise PSD coefficients must be finite");
    }
    return;
  }
  if (table.empty()) throw ParameterError("noise PSD table is empty");
  for (std::size_t k = 0; k < table.size(); ++k) {
    if (!std::isfinite(table[k].first) || !std::isfinite(table[k].second)) {
      throw ParameterError("noise PSD table has a non-finite entry");
    }
    if (k > 0 && !(table[k].first > table[k - 1].first)) {
      throw ParameterError("noise PSD table frequencies must be strictly increasing");
    }
  }
}

void NoiseModel::validate() const {
  if (port_psd.empty()) throw ParameterError("noise model has no PSD profile");
  for (const NoisePsd& p : port_psd) p.validate();
  if (port_psd.size() > 1 && port_psd.size() != port_labels.size()) {
    throw ParameterError("per-port noise PSD needs one profile per port label");
  }
  if (port_labels.empty()) {
    if (rx_correlation.size() != 0) throw ParameterError("noise correlation given without port labels");
    return;
  }
  const auto n = static_cast<Eigen::Index>(port_labels.size());
  if (rx_correlation.rows() != n || rx_correlation.cols() != n) {
    throw ParameterError("noise correlation must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (!rx_correlation.isApprox(rx_correlation.transpose(), 1e-12)) {
    throw ParameterError("noise correlation must be symmetric");
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (std::abs(rx_correlation(k, k) - 1.0) > 1e-12) {
      throw ParameterError("noise correlation must have a unit diagonal");
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(rx_correlation);
  if (llt.info() != Eigen::Success) throw ParameterError("noise correlation is not positive definite");
}

Eigen::MatrixXd NoiseModel::correlation_for(const std::vector<std::string>& rx) const {
  const auto n = static_cast<Eigen::Index>(rx.size());
  if (port_labels.empty()) return Eigen::MatrixXd::Identity(n, n);
  std::vector<Eigen::Index> idx;
  for (const auto& l : rx) {
    auto it = std::find(port_labels.begin(), port_labels.end(), l);
    if (it == port_labels.end()) throw ParameterError("noise model has no port '" + l + "'");
    idx.push_back(it - port_labels.begin());
  }
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index k = 0; k < n; ++k) c(r, k) = rx_correlation(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(k)]);
  }
  return c;
}

double NoiseModel::psd_for(const std::string& rx, double f_hz) const {
  if (port_psd.size() == 1) return port_psd.front().at(f_hz);
  auto it = std::find(port_labels.begin(), port_labels.end(), rx);
  if (it == port_labels.end()) throw ParameterError("noise model has no port '" + rx + "'");
  return port_psd[static_cast<std::size_t>(it - port_labels.begin())].at(f_hz);
}

double PsdMask::level_dbm_hz(double f_hz) const {
  double level = breakpoints.front().second;
  for (const auto& [f, l] : breakpoints) {
    if (f <= f_hz) level = l;
  }
  return level;
}

void PsdMask::validate() const {
  if (breakpoints.empty()) throw ParameterError("PSD mask has no breakpoints");
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    if (!std::isfinite(breakpoints[k].first) || !std::isfinite(breakpoints[k].second)) {
      throw ParameterError("PSD mask has a non-finite breakpoint");
    }
    if (k > 0 && !(breakpoints[k].first > breakpoints[k - 1].first)) {
      throw ParameterError("PSD mask breakpoints must be sorted by frequency");
    }
  }
}

std::vector<double> waterfill(const std::vector<double>& gains, double budget) {
  std::vector<double> p(gains.size(), 0.0);
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < gains.size(); ++k) {
    if (gains[k] > 0.0) order.push_back(k);
  }
  if (order.empty() || !(budget > 0.0)) return p;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return gains[a] > gains[b]; });

  // Largest active set whose water level stays above every member's floor.
  double inv_sum = 0.0, level = 0.0;
  std::size_t active = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double floor = 1.0 / gains[order[k]];
    const double candidate = (budget + inv_sum + floor) / static_cast<double>(k + 1);
    if (candidate <= floor) break;
    inv_sum += floor;
    level = candidate;
    active = k + 1;
  }
  for (std::size_t k = 0; k < active; ++k) p[order[k]] = level - 1.0 / gains[order[k]];
  return p;
}

double capacity_one(const CfrArray& h, const MimoGrid& grid, const NoiseModel& noise,
                    const PsdMask& mask) {
  if (!h.conforms_to(grid)) throw InvalidInput("capacity: realization does not match grid");
  const auto n_rx = static_cast<Eigen::Index>(grid.n_rx());
  const auto n_tx = static_cast<Eigen::Index>(grid.n_tx());
  const Eigen::MatrixXd corr = noise.correlation_for(grid.rx_modes());
  const double df = grid.f_step();

  double total = 0.0;
  Eigen::MatrixXcd hn(n_rx, n_tx);
  for (std::size_t n = 0; n < grid.n_freq(); ++n) {
    const double f = grid.frequency(n);
    // W = D^{1/2} C D^{1/2} df in mW, D = diag(noise PSD per port).
    Eigen::VectorXd amp(n_rx);
    for (Eigen::Index j = 0; j < n_rx; ++j) {
      amp(j) = std::sqrt(std::pow(10.0, noise.psd_for(grid.rx_modes()[static_cast<std::size_t>(j)], f) / 10.0) * df);
    }
    const Eigen::MatrixXd w = amp.asDiagonal() * corr * amp.asDiagonal();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w);
    if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > 0.0)) {
      throw ParameterError("capacity: noise covariance is singular at " + std::to_string(f) + " Hz");
    }
    const Eigen::MatrixXd w_inv_sqrt = eig.eigenvectors() *
                                       eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                       eig.eigenvectors().transpose();
    for (Eigen::Index j = 0; j < n_rx; ++j) {
      for (Eigen::Index i = 0; i < n_tx; ++i) {
        hn(j, i) = h(static_cast<std::size_t>(j), static_cast<std::size_t>(i), n);
      }
    }
    const Eigen::MatrixXcd g = w_inv_sqrt.cast<Complex>() * hn;
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g);
    std::vector<double> gains;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
      gains.push_back(svd.singularValues()(k) * svd.singularValues()(k));
    }
    const double budget = std::pow(10.0, mask.level_dbm_hz(f) / 10.0) * df;
    const std::vector<double> p = waterfill(gains, budget);
    double bits = 0.0;
    for (std::size_t k = 0; k < gains.size(); ++k) bits += std::log2(1.0 + p[k] * gains[k]);
    total += bits * df;
  }
  return total;
}

std::vector<std::pair<double, double>> empirical_ccdf(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  std::vector<std::pair<double, double>> out;
  out.reserve(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    out.emplace_back(values[k], (n - static_cast<double>(k)) / n);
  }
  return out;
}

CapacityResult capacity_ccdf(const ChannelSet& set, const NoiseModel& noise, const PsdMask& mask,
                             std::size_t threads) {
  if (set.empty()) throw InvalidInput("capacity_ccdf: empty channel set");
  noise.validate();
  mask.validate();
  CapacityResult out;
  out.per_realization_bps.resize(set.size());
  parallel_chunks(set.size(), 8, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      out.per_realization_bps[r] = capacity_one(set.realizations[r], set.grid, noise, mask);
    }
  });
  out.ccdf = empirical_ccdf(out.per_realization_bps);
  return out;
}

}  // namespace plcsynth
