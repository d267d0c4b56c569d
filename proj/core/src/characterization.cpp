#include "plcsynth/characterization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "plcsynth/error.hpp"
#include "plcsynth/gev.hpp"

namespace plcsynth {

namespace {

void require_realizations(std::size_t n, const char* what) {
  if (n < 2) {
    throw InsufficientData(std::string(what) + ": need at least 2 realizations, got " +
                           std::to_string(n));
  }
}

std::string describe_coordinate(const MimoGrid& grid, std::size_t p) {
  const std::size_t n = p % grid.n_freq();
  const ModeCombination c = grid.combination(p / grid.n_freq());
  return "coordinate " + std::to_string(p) + " (" + c.label() + ", f = " +
         std::to_string(grid.frequency(n)) + " Hz)";
}

// Columns are realizations. Returns the Pearson correlation of the rows and
// the row standard deviations; rows are offset by `row_offset` in messages.
Eigen::MatrixXd correlation_of_rows(Eigen::MatrixXd x, const MimoGrid& grid, std::size_t row_offset,
                                    const char* quantity, Eigen::VectorXd* mean_out = nullptr,
                                    Eigen::VectorXd* std_out = nullptr) {
  const double dof = static_cast<double>(x.cols() - 1);
  const Eigen::VectorXd mean = x.rowwise().mean();
  x.colwise() -= mean;
  Eigen::VectorXd sd = (x.rowwise().squaredNorm() / dof).cwiseSqrt();
  for (Eigen::Index p = 0; p < sd.size(); ++p) {
    if (!(sd(p) > 0.0)) {
      throw NumericalError(std::string("undefined correlation: zero ") + quantity + " variance at " +
                           describe_coordinate(grid, row_offset + static_cast<std::size_t>(p)));
    }
  }
  const Eigen::VectorXd inv = sd.cwiseInverse();
  x = inv.asDiagonal() * x;
  Eigen::MatrixXd r(x.rows(), x.rows());
  r.setZero();
  r.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0 / dof);
  for (Eigen::Index col = 1; col < r.cols(); ++col) {
    for (Eigen::Index row = 0; row < col; ++row) r(row, col) = r(col, row);
  }
  r = r.cwiseMax(-1.0).cwiseMin(1.0);
  r.diagonal().setOnes();
  if (mean_out) *mean_out = mean;
  if (std_out) *std_out = sd;
  return r;
}

Eigen::MatrixXd reshaped_columns(const std::vector<RealArray>& arrays, const MimoGrid& grid) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(arrays.size()));
  for (std::size_t r = 0; r < arrays.size(); ++r) {
    for (std::size_t i = 0; i < grid.n_tx(); ++i) {
      for (std::size_t j = 0; j < grid.n_rx(); ++j) {
        for (std::size_t n = 0; n < grid.n_freq(); ++n) {
          x(static_cast<Eigen::Index>(grid.index(n, i, j)), static_cast<Eigen::Index>(r)) =
              arrays[r](j, i, n);
        }
      }
    }
  }
  return x;
}

Eigen::MatrixXd combination_columns(const std::vector<RealArray>& arrays, const MimoGrid& grid,
                                    const ModeCombination& combo) {
  const std::size_t i = combo.index / grid.n_rx(), j = combo.index % grid.n_rx();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(grid.n_freq()), static_cast<Eigen::Index>(arrays.size()));
  for (std::size_t r = 0; r < arrays.size(); ++r) {
    auto cfr = arrays[r].cfr(j, i);
    for (std::size_t n = 0; n < grid.n_freq(); ++n) {
      x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(r)) = cfr[n];
    }
  }
  return x;
}

std::vector<double> average_profiles(const std::vector<std::vector<double>>& profiles) {
  std::vector<double> out(profiles.front().size(), 0.0);
  for (const auto& p : profiles) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += p[k];
  }
  for (double& v : out) v /= static_cast<double>(profiles.size());
  return out;
}

// Nelder-Mead minimizer on R^3.
struct Simplex {
  std::array<Eigen::Vector3d, 4> points;
  std::array<double, 4> values;
};

template <class F>
std::pair<Eigen::Vector3d, std::size_t> nelder_mead(F&& f, Eigen::Vector3d start,
                                                    const Eigen::Vector3d& step, bool& converged,
                                                    std::size_t max_iterations = 5000) {
  Simplex s;
  s.points[0] = start;
  for (int k = 0; k < 3; ++k) {
    s.points[static_cast<std::size_t>(k + 1)] = start;
    s.points[static_cast<std::size_t>(k + 1)](k) += step(k);
  }
  for (std::size_t k = 0; k < 4; ++k) s.values[k] = f(s.points[k]);

  converged = false;
  std::size_t it = 0;
  for (; it < max_iterations; ++it) {
    std::array<std::size_t, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s.values[a] < s.values[b]; });
    Simplex sorted;
    for (std::size_t k = 0; k < 4; ++k) {
      sorted.points[k] = s.points[order[k]];
      sorted.values[k] = s.values[order[k]];
    }
    s = sorted;

    double size = 0.0;
    for (std::size_t k = 1; k < 4; ++k) size = std::max(size, (s.points[k] - s.points[0]).cwiseAbs().maxCoeff());
    if (std::abs(s.values[3] - s.values[0]) <= 1e-13 * (std::abs(s.values[0]) + 1e-13) && size < 1e-9) {
      converged = true;
      break;
    }

    const Eigen::Vector3d centroid = (s.points[0] + s.points[1] + s.points[2]) / 3.0;
    const Eigen::Vector3d reflected = centroid + (centroid - s.points[3]);
    const double fr = f(reflected);
    if (fr < s.values[0]) {
      const Eigen::Vector3d expanded = centroid + 2.0 * (centroid - s.points[3]);
      const double fe = f(expanded);
      if (fe < fr) {
        s.points[3] = expanded;
        s.values[3] = fe;
      } else {
        s.points[3] = reflected;
        s.values[3] = fr;
      }
    } else if (fr < s.values[2]) {
      s.points[3] = reflected;
      s.values[3] = fr;
    } else {
      const bool outside = fr < s.values[3];
      const Eigen::Vector3d contracted =
          outside ? Eigen::Vector3d(centroid + 0.5 * (reflected - centroid))
                  : Eigen::Vector3d(centroid + 0.5 * (s.points[3] - centroid));
      const double fc = f(contracted);
      if (fc < (outside ? fr : s.values[3])) {
        s.points[3] = contracted;
        s.values[3] = fc;
      } else {
        for (std::size_t k = 1; k < 4; ++k) {
          s.points[k] = s.points[0] + 0.5 * (s.points[k] - s.points[0]);
          s.values[k] = f(s.points[k]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < 4; ++k) {
    if (s.values[k] < s.values[best]) best = k;
  }
  return {s.points[best], it};
}

}  // namespace

std::vector<ProfileEstimate> estimate_profiles(const PolarSet& polar) {
  const std::size_t n_real = polar.amplitude_db.size();
  require_realizations(n_real, "estimate_profiles");
  const MimoGrid& grid = polar.grid;
  std::vector<ProfileEstimate> out;
  for (const ModeCombination& combo : grid.combinations()) {
    const std::size_t i = combo.index / grid.n_rx(), j = combo.index % grid.n_rx();
    ProfileEstimate est{combo, std::vector<double>(grid.n_freq(), 0.0),
                        std::vector<double>(grid.n_freq(), 0.0)};
    for (const RealArray& a : polar.amplitude_db) {
      auto cfr = a.cfr(j, i);
      for (std::size_t n = 0; n < grid.n_freq(); ++n) est.mean[n] += cfr[n];
    }
    for (double& m : est.mean) m /= static_cast<double>(n_real);
    for (const RealArray& a : polar.amplitude_db) {
      auto cfr = a.cfr(j, i);
      for (std::size_t n = 0; n < grid.n_freq(); ++n) {
        const double d = cfr[n] - est.mean[n];
        est.std[n] += d * d;
      }
    }
    for (double& s : est.std) s = std::sqrt(s / static_cast<double>(n_real - 1));
    out.push_back(std::move(est));
  }
  return out;
}

std::vector<ProfileEstimate> estimate_profiles(const ChannelSet& set) {
  require_realizations(set.size(), "estimate_profiles");
  return estimate_profiles(split_cfr_db(set));
}

EmpiricalCorrelation empirical_block_R(const ChannelSet& set) {
  require_realizations(set.size(), "empirical_block_R");
  const PolarSet polar = split_cfr_db(set);
  Eigen::VectorXd amp_mean, amp_std, phase_std;
  Eigen::MatrixXd ra = correlation_of_rows(reshaped_columns(polar.amplitude_db, set.grid), set.grid,
                                           0, "amplitude", &amp_mean, &amp_std);
  Eigen::MatrixXd rp = correlation_of_rows(reshaped_columns(polar.phase, set.grid), set.grid, 0,
                                           "phase", nullptr, &phase_std);
  return {BlockCovariance(set.grid, CovarianceKind::normalized, std::move(ra)),
          BlockCovariance(set.grid, CovarianceKind::normalized, std::move(rp)), amp_mean, amp_std,
          phase_std};
}

Eigen::MatrixXd amplitude_phase_cross_correlation(const ChannelSet& set) {
  require_realizations(set.size(), "amplitude_phase_cross_correlation");
  const PolarSet polar = split_cfr_db(set);
  auto standardize = [&](Eigen::MatrixXd x, const char* quantity) {
    const double dof = static_cast<double>(x.cols() - 1);
    const Eigen::VectorXd mean = x.rowwise().mean();
    x.colwise() -= mean;
    const Eigen::VectorXd sd = (x.rowwise().squaredNorm() / dof).cwiseSqrt();
    for (Eigen::Index p = 0; p < sd.size(); ++p) {
      if (!(sd(p) > 0.0)) {
        throw NumericalError(std::string("undefined correlation: zero ") + quantity +
                             " variance at " + describe_coordinate(set.grid, static_cast<std::size_t>(p)));
      }
    }
    return Eigen::MatrixXd(sd.cwiseInverse().asDiagonal() * x / std::sqrt(dof));
  };
  const Eigen::MatrixXd a = standardize(reshaped_columns(polar.amplitude_db, set.grid), "amplitude");
  const Eigen::MatrixXd p = standardize(reshaped_columns(polar.phase, set.grid), "phase");
  return a * p.transpose();
}

EmpiricalMatrices empirical_matrices(const ChannelSet& set) {
  EmpiricalCorrelation c = empirical_block_R(set);
  Eigen::MatrixXd q = c.amplitude.release();
  for (Eigen::Index col = 0; col < q.cols(); ++col) {
    q.col(col).array() *= c.amplitude_std.array() * c.amplitude_std(col);
  }
  return {set.grid, std::move(q), c.phase.release(), c.amplitude_mean};
}

AntiDiagonalProfile antidiag_average(const Eigen::MatrixXd& block, double lag_step_hz) {
  if (block.rows() != block.cols()) throw InvalidInput("antidiag_average: block is not square");
  const Eigen::Index n = block.rows();
  AntiDiagonalProfile out{std::vector<double>(static_cast<std::size_t>(n), 0.0), lag_step_hz};
  for (Eigen::Index d = 0; d < n; ++d) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k + d < n; ++k) sum += block(k, k + d) + block(k + d, k);
    out.values[static_cast<std::size_t>(d)] = sum / (2.0 * static_cast<double>(n - d));
  }
  return out;
}

std::size_t unwrap_phase(std::span<const double> wrapped, std::vector<double>& unwrapped) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  unwrapped.assign(wrapped.begin(), wrapped.end());
  std::size_t corrections = 0;
  double offset = 0.0;
  for (std::size_t n = 1; n < wrapped.size(); ++n) {
    const double jump = wrapped[n] - wrapped[n - 1];
    if (jump >= std::numbers::pi) {
      offset -= two_pi;
      ++corrections;
    } else if (jump <= -std::numbers::pi) {
      offset += two_pi;
      ++corrections;
    }
    unwrapped[n] = wrapped[n] + offset;
  }
  return corrections;
}

std::vector<double> extract_phase_slopes(const ChannelSet& set, bool robust) {
  const MimoGrid& grid = set.grid;
  const std::vector<double> f = grid.frequencies();
  std::vector<double> wrapped(grid.n_freq()), unwrapped;
  std::vector<double> slopes;
  slopes.reserve(set.size() * grid.n_combinations());
  for (const CfrArray& h : set.realizations) {
    if (!h.conforms_to(grid)) throw InvalidInput("extract_phase_slopes: realization does not match grid");
    for (const ModeCombination& combo : grid.combinations()) {
      auto cfr = h.cfr(combo.index % grid.n_rx(), combo.index / grid.n_rx());
      for (std::size_t n = 0; n < grid.n_freq(); ++n) {
        double phi = std::arg(cfr[n]);
        if (phi >= std::numbers::pi) phi = -std::numbers::pi;
        wrapped[n] = phi;
      }
      unwrap_phase(wrapped, unwrapped);
      const LineFit fit = robust ? robust_line(f, unwrapped) : least_squares_line(f, unwrapped);
      slopes.push_back(-fit.slope);
    }
  }
  return slopes;
}

GevParameters gev_pwm_estimate(std::span<const double> samples) {
  if (samples.size() < 3) throw InsufficientData("GEV PWM estimate: need at least 3 samples");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double k = static_cast<double>(i);
    b0 += x[i];
    b1 += k / (n - 1.0) * x[i];
    b2 += k * (k - 1.0) / ((n - 1.0) * (n - 2.0)) * x[i];
  }
  b0 /= n;
  b1 /= n;
  b2 /= n;
  // Hosking, Wallis and Wood's approximation; k = -xi.
  const double c = (2.0 * b1 - b0) / (3.0 * b2 - b0) - std::log(2.0) / std::log(3.0);
  double k = 7.8590 * c + 2.9554 * c * c;
  if (std::abs(k) < 1e-8) k = 1e-8;
  const double g = std::tgamma(1.0 + k);
  const double scale = (2.0 * b1 - b0) * k / (g * (1.0 - std::pow(2.0, -k)));
  const double location = b0 + scale * (g - 1.0) / k;
  return {-k, location, scale};
}

GevFit fit_gev(std::span<const double> samples) {
  if (samples.size() < 50) {
    throw InsufficientData("fit_gev: need at least 50 samples, got " + std::to_string(samples.size()));
  }
  const double n = static_cast<double>(samples.size());
  const double m = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double var = 0.0;
  for (double x : samples) var += (x - m) * (x - m);
  const double s = std::sqrt(var / (n - 1.0));

  GevFit out;
  // Spread at rounding level counts as zero.
  if (!(s > 1e-12 * std::abs(m)) || !std::isfinite(s)) {
    out.parameters = {0.0, m, 0.0};
    out.diagnostics.converged = false;
    out.diagnostics.estimates = {0.0, m, 0.0};
    out.diagnostics.note = "degenerate sample: zero spread, scale collapses to 0";
    return out;
  }

  std::vector<double> y(samples.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = (samples[i] - m) / s;

  const auto nll = [&](const Eigen::Vector3d& t) {
    const GevParameters p{t(0), t(1), std::exp(t(2))};
    const double ll = gev::log_likelihood(p, y);
    return std::isfinite(ll) ? -ll : 1e300;
  };

  GevParameters start = gev_pwm_estimate(y);
  if (!(start.scale > 0.0) || !std::isfinite(start.scale)) start = {0.0, 0.0, 1.0};
  Eigen::Vector3d theta(start.shape, start.location, std::log(start.scale));
  if (nll(theta) >= 1e300) theta = {0.0, 0.0, 0.0};

  bool converged = false;
  std::size_t iterations = 0;
  for (int restart = 0; restart < 3; ++restart) {
    auto [best, it] = nelder_mead(nll, theta, Eigen::Vector3d(0.05, 0.1, 0.1), converged);
    theta = best;
    iterations += it;
  }

  // Observed information by central differences.
  Eigen::Matrix3d hessian;
  const double h = 1e-4;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      Eigen::Vector3d ea = Eigen::Vector3d::Zero(), eb = Eigen::Vector3d::Zero();
      ea(a) = h;
      eb(b) = h;
      hessian(a, b) = (nll(theta + ea + eb) - nll(theta + ea - eb) - nll(theta - ea + eb) +
                       nll(theta - ea - eb)) /
                      (4.0 * h * h);
    }
  }

  out.parameters = {theta(0), m + s * theta(1), s * std::exp(theta(2))};
  FitDiagnostics& d = out.diagnostics;
  d.iterations = iterations;
  d.converged = converged;
  d.residual_norm = nll(theta);
  d.estimates = {out.parameters.shape, out.parameters.location, out.parameters.scale};
  Eigen::FullPivLU<Eigen::Matrix3d> lu(hessian);
  if (lu.isInvertible()) {
    const Eigen::Matrix3d cov = lu.inverse();
    d.standard_errors = {std::sqrt(std::max(cov(0, 0), 0.0)), s * std::sqrt(std::max(cov(1, 1), 0.0)),
                         out.parameters.scale * std::sqrt(std::max(cov(2, 2), 0.0))};
  }
  d.note = "maximum likelihood (Nelder-Mead from PWM start); residual_norm holds the negative "
           "log-likelihood of the standardized sample";
  return out;
}

CharacterizationResult characterize(const ChannelSet& set, const CharacterizationOptions& options) {
  require_realizations(set.size(), "characterize");
  const MimoGrid& grid = set.grid;
  const ModelParameters defaults = ModelParameters::published();

  CharacterizationResult out;
  out.params = defaults;
  out.n_realizations = set.size();

  const PolarSet polar = split_cfr_db(set);
  out.profiles = estimate_profiles(polar);
  const std::vector<double> f = grid.frequencies();

  std::vector<std::vector<double>> means, std_nocm, std_cm;
  for (const ProfileEstimate& p : out.profiles) {
    means.push_back(p.mean);
    (p.combo.is_cm() ? std_cm : std_nocm).push_back(p.std);
  }
  out.params.mu = robust_linear_fit(f, average_profiles(means), &out.mu_fit);
  if (!std_nocm.empty()) {
    out.params.sigma_nocm = robust_linear_fit(f, average_profiles(std_nocm), &out.sigma_nocm_fit);
  } else {
    out.sigma_nocm_fit.note = "no non-CM combination in the set; published value kept";
  }
  if (!std_cm.empty()) {
    out.params.sigma_cm = robust_linear_fit(f, average_profiles(std_cm), &out.sigma_cm_fit);
  } else {
    out.sigma_cm_fit.note = "no CM combination in the set; published value kept";
  }

  std::vector<std::vector<double>> ad_nocm, ad_cm;
  for (const ModeCombination& combo : grid.combinations()) {
    const Eigen::MatrixXd block =
        correlation_of_rows(combination_columns(polar.amplitude_db, grid, combo), grid,
                            combo.index * grid.n_freq(), "amplitude");
    (combo.is_cm() ? ad_cm : ad_nocm).push_back(antidiag_average(block, grid.f_step()).values);
  }
  if (!ad_nocm.empty()) {
    out.has_nocm = true;
    out.antidiag_nocm = {average_profiles(ad_nocm), grid.f_step()};
    const CurveFit fit = fit_power(out.antidiag_nocm, options.power_window);
    out.params.antidiag_nocm = fit.coefficients;
    out.power_nocm_fit = fit.diagnostics;
  } else {
    out.power_nocm_fit.note = "no non-CM combination in the set; published value kept";
  }
  if (!ad_cm.empty()) {
    out.has_cm = true;
    out.antidiag_cm = {average_profiles(ad_cm), grid.f_step()};
    const CurveFit fit = fit_power(out.antidiag_cm, options.power_window);
    out.params.antidiag_cm_power = fit.coefficients;
    out.power_cm_fit = fit.diagnostics;
    out.exp_cm_fit.note = "exponential tail not fitted; published value kept";
    if (options.fit_exponential_tail) {
      try {
        const CurveFit tail = fit_exponential_tail(out.antidiag_cm, options.exp_lag_floor_hz,
                                                   fit.coefficients);
        out.params.antidiag_cm_exp = tail.coefficients;
        out.exp_cm_fit = tail.diagnostics;
      } catch (const InsufficientData& e) {
        out.exp_cm_fit.note = std::string(e.what()) + "; published value kept";
      }
    }
    out.params.cm_exp_threshold_hz = options.exp_lag_floor_hz;
  } else {
    out.power_cm_fit.note = "no CM combination in the set; published value kept";
    out.exp_cm_fit.note = out.power_cm_fit.note;
  }

  const std::vector<double> slopes = extract_phase_slopes(set, options.robust_phase_slope);
  if (slopes.size() >= 50) {
    const GevFit g = fit_gev(slopes);
    out.gev_fit = g.diagnostics;
    if (g.parameters.scale > 0.0) {
      out.params.gev = g.parameters;
    } else {
      out.gev_fit.note += "; published value kept";
    }
  } else {
    out.gev_fit.note = "fewer than 50 phase-slope samples; published value kept";
  }
  return out;
}

}  // namespace plcsynth
