#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "plcsynth/characterization.hpp"
#include "plcsynth/covariance.hpp"
#include "plcsynth/curve_fit.hpp"
#include "plcsynth/error.hpp"
#include "plcsynth/gev.hpp"
#include "plcsynth/robust_fit.hpp"

using namespace plcsynth;

namespace {

const ModelParameters kPub = ModelParameters::published();

AntiDiagonalProfile curve_profile(const CurveCoefficients& c, std::size_t n, double step) {
  AntiDiagonalProfile p{{1.0}, step};
  for (std::size_t d = 1; d < n; ++d) p.values.push_back(std::clamp(c.power(d * step), 0.0, 1.0));
  return p;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST(RobustLine, ExactLine) {
  std::vector<double> x, y;
  for (int k = 0; k < 10; ++k) {
    x.push_back(k);
    y.push_back(2.0 * k + 1.0);
  }
  const LineFit f = robust_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_TRUE(f.diagnostics.converged);
}

TEST(RobustLine, ResistsGrossOutlier) {
  std::vector<double> x, y;
  for (int k = 0; k < 20; ++k) {
    x.push_back(k);
    y.push_back(2.0 * k + 1.0 + (k % 2 ? 0.1 : -0.1));
  }
  y.back() += 100.0;
  const LineFit ols = least_squares_line(x, y);
  const LineFit rob = robust_line(x, y);
  EXPECT_GE(rel(ols.slope, 2.0), 0.05);
  EXPECT_LE(rel(rob.slope, 2.0), 0.01);
}

TEST(RobustLine, DegenerateAbscissa) {
  const std::vector<double> x{1, 1, 1}, y{1, 2, 3};
  EXPECT_THROW(robust_line(x, y), NumericalError);
  EXPECT_THROW(robust_line(std::vector<double>{1, 2}, std::vector<double>{1, 2}), InsufficientData);
}

TEST(RobustLine, FrequencyUnits) {
  std::vector<double> f, y;
  for (int k = 0; k < 50; ++k) {
    f.push_back(1.8e6 + k * 1e6);
    y.push_back(kPub.mu.at(f.back()));
  }
  const LinearProfile p = robust_linear_fit(f, y);
  EXPECT_NEAR(p.slope_db_per_ghz, -184.68, 1e-8);
  EXPECT_NEAR(p.intercept_db, -42.44, 1e-10);
}

TEST(PowerFit, NoiselessInversion) {
  for (const CurveCoefficients& c : {kPub.antidiag_nocm, kPub.antidiag_cm_power}) {
    const CurveFit fit = fit_power(curve_profile(c, 1588, 62.5e3));
    EXPECT_TRUE(fit.diagnostics.converged);
    EXPECT_LE(rel(fit.coefficients.a, c.a), 0.01);
    EXPECT_LE(rel(fit.coefficients.b, c.b), 0.01);
    EXPECT_LE(rel(fit.coefficients.c, c.c), 0.01);
  }
}

TEST(PowerFit, NoisyProfileKeepsFloor) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.01);
  AntiDiagonalProfile p = curve_profile(kPub.antidiag_nocm, 1588, 62.5e3);
  for (std::size_t d = 1; d < p.values.size(); ++d) p.values[d] += noise(rng);
  const CurveFit fit = fit_power(p);
  EXPECT_NEAR(fit.coefficients.c, kPub.antidiag_nocm.c, 0.05);
}

TEST(PowerFit, ConstantProfileIsFlagged) {
  AntiDiagonalProfile p{std::vector<double>(700, 0.6), 62.5e3};
  p.values[0] = 1.0;
  const CurveFit fit = fit_power(p);
  const bool degenerate = !fit.diagnostics.converged || std::abs(fit.coefficients.a) < 1e-6;
  EXPECT_TRUE(degenerate);
  if (fit.diagnostics.converged) {
    EXPECT_NEAR(fit.coefficients.c, 0.6, 1e-6);
  }
}

TEST(PowerFit, NeedsFourLags) {
  EXPECT_THROW(fit_power(curve_profile(kPub.antidiag_nocm, 4, 10e6)), InsufficientData);
}

TEST(ExponentialTail, ZeroResidual) {
  const AntiDiagonalProfile p = curve_profile(kPub.antidiag_cm_power, 1588, 62.5e3);
  const CurveFit fit = fit_exponential_tail(p, 40e6, kPub.antidiag_cm_power);
  EXPECT_NEAR(fit.coefficients.exponential(40e6), 0.0, 1e-9);
  for (double f : {50e6, 70e6, 99e6}) EXPECT_NEAR(fit.coefficients.exponential(f), 0.0, 1e-9);
}

TEST(ExponentialTail, NoiselessInversion) {
  const CurveCoefficients& e = kPub.antidiag_cm_exp;
  AntiDiagonalProfile p = curve_profile(kPub.antidiag_cm_power, 1588, 62.5e3);
  for (std::size_t d = 640; d < p.values.size(); ++d) p.values[d] += e.exponential(d * 62.5e3);
  const CurveFit fit = fit_exponential_tail(p, 40e6, kPub.antidiag_cm_power);
  EXPECT_LE(rel(fit.coefficients.a, e.a), 0.02);
  EXPECT_LE(rel(fit.coefficients.b, e.b), 0.02);
  // The residual is shifted to zero at the floor, which moves the constant.
  EXPECT_LE(rel(fit.coefficients.c, e.c - e.exponential(40e6)), 0.02);
  EXPECT_LE(std::abs(fit.coefficients.exponential(40e6)), 0.01);
}

TEST(GevFit, RecoversParametersFromLargeSample) {
  const GevParameters truth = kPub.gev;
  RandomStream rng(777);
  std::vector<double> x(100000);
  for (double& v : x) v = gev::sample(truth, rng);
  const GevFit fit = fit_gev(x);
  EXPECT_TRUE(fit.diagnostics.converged);
  EXPECT_LE(rel(fit.parameters.location, truth.location), 0.03);
  EXPECT_LE(rel(fit.parameters.scale, truth.scale), 0.03);
  EXPECT_LE(rel(fit.parameters.shape, truth.shape), 0.03);
  const GevParameters pwm = gev_pwm_estimate(x);
  EXPECT_LE(rel(pwm.location, truth.location), 0.05);
}

TEST(GevFit, DegenerateAndSmallSamples) {
  const std::vector<double> same(100, 1e-6);
  const GevFit fit = fit_gev(same);
  EXPECT_FALSE(fit.diagnostics.converged);
  EXPECT_EQ(fit.parameters.scale, 0.0);
  EXPECT_THROW(fit_gev(std::vector<double>(49, 1.0)), InsufficientData);
}
