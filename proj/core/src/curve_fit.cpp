#include "plcsynth/curve_fit.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "plcsynth/error.hpp"

namespace plcsynth {

namespace {

// Frequencies are handled in MHz inside the optimizer to keep the Jacobian
// columns within a few orders of magnitude of each other.
constexpr double kUnit = 1e6;

enum class Family { power, exponential };

// Curve family plus an optional saturation ceiling: the fitted value is
// min(curve, ceiling), matching profiles that were clamped when generated.
struct Shape {
  Family family;
  double ceiling = std::numeric_limits<double>::infinity();
};

double raw_model(Shape shape, double x, const Eigen::Vector3d& t) {
  return shape.family == Family::power ? t(0) * std::pow(x, t(1)) + t(2)
                                       : t(0) * std::exp(t(1) * x) + t(2);
}

double model(Shape shape, double x, const Eigen::Vector3d& t) {
  return std::min(raw_model(shape, x, t), shape.ceiling);
}

Eigen::Vector3d gradient(Shape shape, double x, const Eigen::Vector3d& t) {
  if (raw_model(shape, x, t) >= shape.ceiling) return Eigen::Vector3d::Zero();
  if (shape.family == Family::power) {
    const double p = std::pow(x, t(1));
    return {p, t(0) * p * std::log(x), 1.0};
  }
  const double e = std::exp(t(1) * x);
  return {e, t(0) * e * x, 1.0};
}

double cost(Shape shape, const std::vector<double>& x, const std::vector<double>& y,
            const Eigen::Vector3d& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - model(shape, x[i], t);
    s += r * r;
  }
  return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
}

struct LmResult {
  Eigen::Vector3d theta;
  double cost;
  std::size_t iterations;
  bool converged;
  Eigen::Matrix3d jtj;
};

LmResult levenberg_marquardt(Shape shape, const std::vector<double>& x,
                             const std::vector<double>& y, Eigen::Vector3d theta,
                             const CurveFitOptions& options) {
  double lambda = 1e-3;
  double c = cost(shape, x, y, theta);
  LmResult out{theta, c, 0, false, Eigen::Matrix3d::Zero()};
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    out.iterations = it;
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const Eigen::Vector3d g = gradient(shape, x[i], theta);
      jtj += g * g.transpose();
      jtr += g * (y[i] - model(shape, x[i], theta));
    }
    out.jtj = jtj;
    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::Matrix3d a = jtj;
      for (int k = 0; k < 3; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-30);
      const Eigen::Vector3d step = a.ldlt().solve(jtr);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Eigen::Vector3d trial = theta + step;
      const double tc = cost(shape, x, y, trial);
      if (tc <= c) {
        const bool small = step.norm() <= options.step_tolerance * (theta.norm() + options.step_tolerance);
        const bool flat = c - tc <= 1e-15 * std::max(c, 1e-300);
        theta = trial;
        c = tc;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (small || flat) {
          out.converged = true;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // No descent direction left: at a (possibly degenerate) minimum.
      out.converged = jtr.norm() <= 1e-8 * (1.0 + std::sqrt(c));
      break;
    }
    if (out.converged) break;
  }
  out.theta = theta;
  out.cost = c;
  return out;
}

// For a fixed exponent the model is linear in (a, c).
std::pair<Eigen::Vector3d, double> project(Shape shape, const std::vector<double>& x,
                                           const std::vector<double>& y, double b) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(x.size()), 2);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    a(k, 0) = shape.family == Family::power ? std::pow(x[i], b) : std::exp(b * x[i]);
    a(k, 1) = 1.0;
    rhs(k) = y[i];
  }
  const Eigen::Vector2d sol = a.colPivHouseholderQr().solve(rhs);
  const Eigen::Vector3d t(sol(0), b, sol(1));
  return {t, cost(shape, x, y, t)};
}

Eigen::Vector3d scan_start(Shape shape, const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> grid;
  if (shape.family == Family::power) {
    for (double b = -4.0; b <= -0.01; b += 0.01) grid.push_back(b);
  } else {
    for (double e = -4.0; e <= 0.0; e += 0.02) {
      grid.push_back(std::pow(10.0, e));
      grid.push_back(-std::pow(10.0, e));
    }
  }
  Eigen::Vector3d best(0.0, grid.front(), 0.0);
  double best_cost = std::numeric_limits<double>::infinity();
  for (double b : grid) {
    auto [t, c] = project(shape, x, y, b);
    // Ties resolved toward the smaller |b|.
    if (c < best_cost || (c == best_cost && std::abs(b) < std::abs(best(1)))) {
      best = t;
      best_cost = c;
    }
  }
  return best;
}

Eigen::Vector3d loglog_start(const std::vector<double>& x, const std::vector<double>& y) {
  double floor = std::numeric_limits<double>::infinity();
  for (double v : y) floor = std::min(floor, v);
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = y[i] - floor;
    if (d > 1e-12) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(d));
    }
  }
  if (lx.size() < 2) return {0.0, -1.0, floor};
  const LineFit l = least_squares_line(lx, ly);
  return {std::exp(l.intercept), l.slope, floor};
}

CurveFit finish(Shape shape, const std::vector<double>& x,
                const LmResult& lm, const std::string& note) {
  CurveFit fit;
  const Eigen::Vector3d& t = lm.theta;
  if (shape.family == Family::power) {
    fit.coefficients = {t(0) * std::pow(kUnit, -t(1)), t(1), t(2)};
  } else {
    fit.coefficients = {t(0), t(1) / kUnit, t(2)};
  }
  FitDiagnostics& d = fit.diagnostics;
  d.residual_norm = std::sqrt(lm.cost);
  d.iterations = lm.iterations;
  d.converged = lm.converged && std::isfinite(lm.cost);
  d.estimates = {fit.coefficients.a, fit.coefficients.b, fit.coefficients.c};
  d.note = note;

  // Standard errors in the optimizer's units, mapped back for a and b.
  const double dof = x.size() > 3 ? static_cast<double>(x.size() - 3) : 1.0;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(lm.jtj);
  if (lu.isInvertible()) {
    const Eigen::Matrix3d cov = lu.inverse() * (lm.cost / dof);
    std::vector<double> se(3);
    for (int k = 0; k < 3; ++k) se[static_cast<std::size_t>(k)] = std::sqrt(std::max(cov(k, k), 0.0));
    if (shape.family == Family::power) {
      se[0] *= std::pow(kUnit, -t(1));
    } else {
      se[1] /= kUnit;
    }
    d.standard_errors = se;
  } else {
    d.standard_errors.assign(3, std::numeric_limits<double>::quiet_NaN());
    d.converged = false;
    d.note += "; exponent not identifiable";
  }
  return fit;
}

CurveFit fit_curve(Shape shape, std::span<const double> f_hz, std::span<const double> y,
                   const CurveFitOptions& options) {
  if (f_hz.size() != y.size()) throw InvalidInput("curve fit: x and y lengths differ");
  if (f_hz.size() < 4) throw InsufficientData("curve fit: need at least 4 points");
  std::vector<double> x(f_hz.size()), yy(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = f_hz[i] / kUnit;
    if (shape.family == Family::power && !(x[i] > 0.0)) {
      throw InvalidInput("power fit: frequencies must be positive");
    }
  }

  // Starting points come from the unsaturated curve. With a ceiling, they are
  // also taken from the tail past the leading near-saturated run, at a few
  // depths below the ceiling.
  std::vector<std::size_t> tails{0};
  if (std::isfinite(shape.ceiling)) {
    for (double depth : {0.0, 0.01, 0.02, 0.05, 0.1}) {
      std::size_t k = 0;
      while (k < yy.size() && yy[k] >= shape.ceiling - depth * std::abs(shape.ceiling)) ++k;
      if (yy.size() - k >= 4 && k != tails.back()) tails.push_back(k);
    }
  }
  const Shape open_shape{shape.family};
  std::optional<LmResult> best;
  std::string note;
  auto consider = [&](const Eigen::Vector3d& start, const std::string& label) {
    LmResult r = levenberg_marquardt(shape, x, yy, start, options);
    const bool better = !best || (r.converged && !best->converged) ||
                        (r.converged == best->converged &&
                         (r.cost < best->cost ||
                          (r.cost == best->cost && std::abs(r.theta(1)) < std::abs(best->theta(1)))));
    if (better) {
      best = std::move(r);
      note = label;
    }
  };
  for (std::size_t k : tails) {
    const std::vector<double> tx(x.begin() + static_cast<std::ptrdiff_t>(k), x.end());
    const std::vector<double> ty(yy.begin() + static_cast<std::ptrdiff_t>(k), yy.end());
    const std::string from = k == 0 ? "" : " (start from lag index " + std::to_string(k) + ")";
    if (shape.family == Family::power) consider(loglog_start(tx, ty), "LM from log-log start" + from);
    consider(scan_start(open_shape, tx, ty), "LM from b-scan" + from);
  }
  return finish(shape, x, *best, note);
}

}  // namespace

CurveFit fit_power_curve(std::span<const double> f_hz, std::span<const double> y,
                         const CurveFitOptions& options) {
  return fit_curve(Shape{Family::power}, f_hz, y, options);
}

CurveFit fit_exponential_curve(std::span<const double> f_hz, std::span<const double> y,
                               const CurveFitOptions& options) {
  return fit_curve(Shape{Family::exponential}, f_hz, y, options);
}

CurveFit fit_power(const AntiDiagonalProfile& profile, const PowerFitWindow& window,
                   const CurveFitOptions& options) {
  std::vector<double> f, y;
  for (std::size_t d = 1; d < profile.values.size(); ++d) {
    const double lag = static_cast<double>(d) * profile.lag_step_hz;
    if (lag > window.lag_cap_hz * (1.0 + 1e-12)) break;
    f.push_back(lag);
    y.push_back(profile.values[d]);
  }
  if (f.size() < 4) throw InsufficientData("fit_power: fewer than 4 lags under the cap");
  return fit_curve(Shape{Family::power, window.saturation_level}, f, y, options);
}

CurveFit fit_exponential_tail(const AntiDiagonalProfile& profile, double lag_floor_hz,
                              const CurveCoefficients& power_part, const CurveFitOptions& options) {
  std::vector<double> f, y;
  double shift = 0.0;
  bool have_shift = false;
  for (std::size_t d = 1; d < profile.values.size(); ++d) {
    const double lag = static_cast<double>(d) * profile.lag_step_hz;
    if (lag < lag_floor_hz * (1.0 - 1e-12)) continue;
    const double residual = profile.values[d] - power_part.power(lag);
    if (!have_shift) {
      shift = residual;
      have_shift = true;
    }
    f.push_back(lag);
    y.push_back(residual - shift);
  }
  if (f.size() < 4) throw InsufficientData("fit_exponential_tail: fewer than 4 lags above the floor");
  return fit_exponential_curve(f, y, options);
}

}  // namespace plcsynth
