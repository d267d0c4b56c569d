#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "plcsynth/error.hpp"
#include "plcsynth/gev.hpp"
#include "plcsynth/rng.hpp"

using namespace plcsynth;

namespace {

const GevParameters kGev{-0.08, 1.133e-6, 5.323e-7};

double quantile_oracle(const GevParameters& p, double u) {
  return p.location + p.scale * (std::pow(-std::log(u), -p.shape) - 1.0) / p.shape;
}

}  // namespace

TEST(RandomStream, DeterministicAndDistinct) {
  RandomStream a(42, 3, Substream::amplitude), b(42, 3, Substream::amplitude);
  RandomStream c(42, 3, Substream::phase), d(42, 4, Substream::amplitude), e(43, 3, Substream::amplitude);
  std::set<double> firsts;
  for (int k = 0; k < 5; ++k) {
    const double x = a.normal();
    EXPECT_EQ(x, b.normal());
  }
  firsts.insert(RandomStream(42, 3, Substream::amplitude).normal());
  firsts.insert(c.normal());
  firsts.insert(d.normal());
  firsts.insert(e.normal());
  EXPECT_EQ(firsts.size(), 4u);
}

TEST(RandomStream, UniformOpenInterval) {
  RandomStream r(1);
  for (int k = 0; k < 100000; ++k) {
    const double u = r.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Gev, QuantileAndCdfAgreeWithClosedForm) {
  for (double u : {1e-6, 0.01, 0.3, 0.5, 0.9, 0.999999}) {
    const double x = gev::quantile(kGev, u);
    EXPECT_NEAR(x, quantile_oracle(kGev, u), 1e-18);
    EXPECT_NEAR(gev::cdf(kGev, x), u, 1e-12);
  }
  const GevParameters gumbel{0.0, 1.0, 2.0};
  EXPECT_NEAR(gev::quantile(gumbel, 0.5), 1.0 - 2.0 * std::log(std::log(2.0)), 1e-12);
}

TEST(Gev, LogPdfIntegratesToOne) {
  const double lo = gev::quantile(kGev, 1e-12), hi = gev::quantile(kGev, 1 - 1e-12);
  const int n = 200000;
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += std::exp(gev::log_pdf(kGev, lo + (k + 0.5) * h)) * h;
  EXPECT_NEAR(s, 1.0, 1e-6);
  // Outside the support (upper bound for negative shape).
  const double upper = kGev.location - kGev.scale / kGev.shape;
  EXPECT_EQ(gev::log_pdf(kGev, upper * 1.01), -std::numeric_limits<double>::infinity());
}

TEST(Gev, MeanMatchesNumericalIntegration) {
  const int n = 1000000;
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += quantile_oracle(kGev, (k + 0.5) / n);
  const double numeric = s / n;
  EXPECT_NEAR(gev::mean(kGev), numeric, 1e-3 * numeric);
  EXPECT_NEAR(gev::mean(kGev), 1.401e-6, 0.001e-6);
}

TEST(Gev, SampleMeanWithinOnePercent) {
  RandomStream rng(2024);
  std::vector<double> x(100000);
  for (double& v : x) v = gev::sample(kGev, rng);
  EXPECT_NEAR(oracle::mean(x), 1.401e-6, 0.01 * 1.401e-6);
  const double d = oracle::ks_statistic(x, [](double v) { return gev::cdf(kGev, v); });
  EXPECT_GT(oracle::ks_pvalue(d, x.size()), 0.01);
}
