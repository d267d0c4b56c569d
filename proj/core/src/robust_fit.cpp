#include "plcsynth/robust_fit.hpp"

#include <algorithm>
#include <cmath>

#include "plcsynth/error.hpp"

namespace plcsynth {

namespace {

struct WeightedLine {
  double slope;
  double intercept;
  double slope_se;
  double intercept_se;
};

// Weighted least squares for y = intercept + slope x, centered for stability.
WeightedLine weighted_line(std::span<const double> x, std::span<const double> y,
                           const std::vector<double>& w) {
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  if (sw <= 0.0) throw NumericalError("line fit: all weights are zero");
  const double xm = sx / sw, ym = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  std::size_t n_active = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - xm) * (x[i] - xm);
    sxy += w[i] * (x[i] - xm) * (y[i] - ym);
    if (w[i] > 0.0) ++n_active;
  }
  if (!(sxx > 0.0)) throw NumericalError("line fit: singular design (x is constant)");
  WeightedLine out;
  out.slope = sxy / sxx;
  out.intercept = ym - out.slope * xm;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - out.intercept - out.slope * x[i];
    rss += w[i] * r * r;
  }
  const double dof = n_active > 2 ? static_cast<double>(n_active - 2) : 1.0;
  const double s2 = rss / dof;
  out.slope_se = std::sqrt(s2 / sxx);
  out.intercept_se = std::sqrt(s2 * (1.0 / sw + xm * xm / sxx));
  return out;
}

void check_inputs(std::span<const double> x, std::span<const double> y, std::size_t min_n) {
  if (x.size() != y.size()) throw InvalidInput("line fit: x and y lengths differ");
  if (x.size() < min_n) {
    throw InsufficientData("line fit: need at least " + std::to_string(min_n) + " points");
  }
}

double residual_norm(std::span<const double> x, std::span<const double> y, double slope,
                     double intercept) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - intercept - slope * x[i];
    s += r * r;
  }
  return std::sqrt(s);
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidInput("median of an empty sequence");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  double m = *mid;
  if (values.size() % 2 == 0) m = 0.5 * (m + *std::max_element(values.begin(), mid));
  return m;
}

LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  check_inputs(x, y, 2);
  const WeightedLine l = weighted_line(x, y, std::vector<double>(x.size(), 1.0));
  LineFit fit{l.slope, l.intercept, {}};
  fit.diagnostics.residual_norm = residual_norm(x, y, l.slope, l.intercept);
  fit.diagnostics.iterations = 1;
  fit.diagnostics.converged = true;
  fit.diagnostics.estimates = {l.slope, l.intercept};
  fit.diagnostics.standard_errors = {l.slope_se, l.intercept_se};
  return fit;
}

LineFit robust_line(std::span<const double> x, std::span<const double> y,
                    const RobustFitOptions& options) {
  check_inputs(x, y, 3);
  const std::size_t n = x.size();
  std::vector<double> w(n, 1.0), w_prev(n), r(n), abs_dev(n);
  WeightedLine line = weighted_line(x, y, w);

  double y_magnitude = 0.0;
  for (double v : y) y_magnitude = std::max(y_magnitude, std::abs(v));

  FitDiagnostics diag;
  diag.note = "IRLS bisquare, tuning " + std::to_string(options.tuning);
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    diag.iterations = it;
    for (std::size_t i = 0; i < n; ++i) r[i] = y[i] - line.intercept - line.slope * x[i];
    const double center = median(r);
    for (std::size_t i = 0; i < n; ++i) abs_dev[i] = std::abs(r[i] - center);
    const double scale = options.mad_scale * median(abs_dev);
    if (!(scale > 1e-13 * y_magnitude)) {
      // At least half of the points lie on the current line to rounding.
      diag.converged = true;
      break;
    }
    w_prev = w;
    double max_change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = r[i] / (options.tuning * scale);
      w[i] = std::abs(u) < 1.0 ? (1.0 - u * u) * (1.0 - u * u) : 0.0;
      max_change = std::max(max_change, std::abs(w[i] - w_prev[i]));
    }
    line = weighted_line(x, y, w);
    if (max_change < options.weight_tolerance) {
      diag.converged = true;
      break;
    }
  }
  diag.residual_norm = residual_norm(x, y, line.slope, line.intercept);
  diag.estimates = {line.slope, line.intercept};
  diag.standard_errors = {line.slope_se, line.intercept_se};
  return {line.slope, line.intercept, std::move(diag)};
}

LinearProfile robust_linear_fit(std::span<const double> f_hz, std::span<const double> y_db,
                                FitDiagnostics* diagnostics, const RobustFitOptions& options) {
  std::vector<double> f_ghz(f_hz.begin(), f_hz.end());
  for (double& f : f_ghz) f *= 1e-9;
  LineFit fit = robust_line(f_ghz, y_db, options);
  if (diagnostics) *diagnostics = std::move(fit.diagnostics);
  return {fit.slope, fit.intercept};
}

}  // namespace plcsynth
