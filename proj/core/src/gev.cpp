#include "plcsynth/gev.hpp"

#include <cmath>
#include <limits>

namespace plcsynth::gev {

namespace {

constexpr double kGumbelShape = 1e-12;

}  // namespace

double cdf(const GevParameters& p, double x) {
  const double z = (x - p.location) / p.scale;
  if (std::abs(p.shape) < kGumbelShape) return std::exp(-std::exp(-z));
  const double t = 1.0 + p.shape * z;
  if (t <= 0.0) return p.shape > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::pow(t, -1.0 / p.shape));
}

double log_pdf(const GevParameters& p, double x) {
  const double z = (x - p.location) / p.scale;
  if (std::abs(p.shape) < kGumbelShape) return -std::log(p.scale) - z - std::exp(-z);
  const double t = 1.0 + p.shape * z;
  if (t <= 0.0) return -std::numeric_limits<double>::infinity();
  const double lt = std::log(t);
  return -std::log(p.scale) - (1.0 + 1.0 / p.shape) * lt - std::exp(-lt / p.shape);
}

double quantile(const GevParameters& p, double u) {
  const double y = -std::log(u);
  if (std::abs(p.shape) < kGumbelShape) return p.location - p.scale * std::log(y);
  return p.location + p.scale * (std::pow(y, -p.shape) - 1.0) / p.shape;
}

double mean(const GevParameters& p) {
  if (std::abs(p.shape) < kGumbelShape) {
    return p.location + p.scale * 0.57721566490153286061;
  }
  if (p.shape >= 1.0) return std::numeric_limits<double>::infinity();
  return p.location + p.scale * (std::tgamma(1.0 - p.shape) - 1.0) / p.shape;
}

double sample(const GevParameters& p, RandomStream& rng) { return quantile(p, rng.uniform_open()); }

double log_likelihood(const GevParameters& p, std::span<const double> samples) {
  double sum = 0.0;
  for (double x : samples) {
    const double l = log_pdf(p, x);
    if (!std::isfinite(l)) return -std::numeric_limits<double>::infinity();
    sum += l;
  }
  return sum;
}

}  // namespace plcsynth::gev
