#include "plcsynth/parameters.hpp"

#include <cmath>

#include "plcsynth/error.hpp"

namespace plcsynth {

double CurveCoefficients::power(double f_hz) const { return a * std::pow(f_hz, b) + c; }

double CurveCoefficients::exponential(double f_hz) const { return a * std::exp(b * f_hz) + c; }

ModelParameters ModelParameters::published() {
  ModelParameters p;
  p.mu = {-184.68, -42.44};
  p.sigma_nocm = {20.86, 15.41};
  p.sigma_cm = {27.80, 9.64};
  p.antidiag_nocm = {0.133e6, -0.906, 0.731};
  p.antidiag_cm_power = {1.679e6, -1.040, 0.501};
  p.antidiag_cm_exp = {-0.022, 0.031e-6, 0.072};
  p.cm_exp_threshold_hz = 40e6;
  p.gev = {-0.08, 1.133e-6, 5.323e-7};
  return p;
}

std::array<double, 15> ModelParameters::core() const {
  return {mu.slope_db_per_ghz,         mu.intercept_db,
          sigma_nocm.slope_db_per_ghz, sigma_nocm.intercept_db,
          sigma_cm.slope_db_per_ghz,   sigma_cm.intercept_db,
          antidiag_nocm.a,             antidiag_nocm.b,
          antidiag_nocm.c,             antidiag_cm_power.a,
          antidiag_cm_power.b,         antidiag_cm_power.c,
          gev.shape,                   gev.location,
          gev.scale};
}

void ModelParameters::validate() const {
  for (double v : core()) {
    if (!std::isfinite(v)) throw ParameterError("model parameters contain a non-finite value");
  }
  for (double v : refinement()) {
    if (!std::isfinite(v)) throw ParameterError("exponential refinement contains a non-finite value");
  }
  if (!(std::isfinite(cm_exp_threshold_hz) && cm_exp_threshold_hz >= 0.0)) {
    throw ParameterError("exponential refinement threshold must be a non-negative frequency");
  }
  if (!(gev.scale > 0.0)) throw ParameterError("GEV scale must be positive");
}

std::uint64_t ModelParameters::covariance_hash(bool exp_refinement) const {
  Fnv1a h;
  for (double v : {sigma_nocm.slope_db_per_ghz, sigma_nocm.intercept_db,
                   sigma_cm.slope_db_per_ghz, sigma_cm.intercept_db, antidiag_nocm.a,
                   antidiag_nocm.b, antidiag_nocm.c, antidiag_cm_power.a, antidiag_cm_power.b,
                   antidiag_cm_power.c}) {
    h.add(v);
  }
  h.add(static_cast<std::uint64_t>(exp_refinement));
  if (exp_refinement) {
    h.add(antidiag_cm_exp.a);
    h.add(antidiag_cm_exp.b);
    h.add(antidiag_cm_exp.c);
    h.add(cm_exp_threshold_hz);
  }
  return h.value();
}

double mu_profile(const ModelParameters& params, double f_hz) { return params.mu.at(f_hz); }

double sigma_profile(const ModelParameters& params, double f_hz, const ModeCombination& combo) {
  return combo.is_cm() ? params.sigma_cm.at(f_hz) : params.sigma_nocm.at(f_hz);
}

}  // namespace plcsynth
