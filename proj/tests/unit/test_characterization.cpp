#include <gtest/gtest.h>

#include <numbers>

#include "plcsynth/characterization.hpp"
#include "plcsynth/error.hpp"
#include "plcsynth/generator.hpp"

using namespace plcsynth;
constexpr double kPi = std::numbers::pi;

namespace {

const ModelParameters kPub = ModelParameters::published();

ChannelSet from_db(const MimoGrid& g, const std::vector<std::vector<double>>& db_per_realization) {
  ChannelSet set(g);
  for (const auto& db : db_per_realization) {
    CfrArray h(g);
    for (std::size_t k = 0; k < h.size(); ++k) h.data()[k] = std::pow(10.0, db[k % db.size()] / 20.0);
    set.realizations.push_back(h);
  }
  return set;
}

ChannelSet generated(std::size_t n, Scheme s, std::size_t decimation, std::uint64_t seed) {
  GeneratorConfig c;
  c.n_realizations = n;
  c.scheme = s;
  c.decimation = decimation;
  c.seed = seed;
  return generate(c, kPub);
}

}  // namespace

TEST(EstimateProfiles, HandComputedValues) {
  const MimoGrid g({"PN"}, {"P"}, 2, 1e6, 1e6);
  const auto p = estimate_profiles(from_db(g, {{-40.0}, {-44.0}}));
  ASSERT_EQ(p.size(), 1u);
  EXPECT_NEAR(p[0].mean[0], -42.0, 1e-12);
  EXPECT_NEAR(p[0].std[0], 2.0 * std::sqrt(2.0), 1e-12);
}

TEST(EstimateProfiles, IdenticalRealizationsHaveZeroStd) {
  const MimoGrid g({"PN"}, {"P", "N"}, 3, 1e6, 1e6);
  const auto p = estimate_profiles(from_db(g, {{-40.0, -41.0}, {-40.0, -41.0}, {-40.0, -41.0}}));
  for (const auto& e : p) {
    for (double s : e.std) EXPECT_EQ(s, 0.0);
  }
  EXPECT_THROW(estimate_profiles(from_db(g, {{-40.0}})), InsufficientData);
}

TEST(EmpiricalBlockR, ZeroVarianceNamesTheCoordinate) {
  const MimoGrid g({"PN"}, {"P"}, 2, 1e6, 1e6);
  try {
    empirical_block_R(from_db(g, {{-40.0}, {-40.0}}));
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("PN->P"), std::string::npos) << e.what();
  }
}

TEST(EmpiricalBlockR, TwoRealizationsAreFullyCorrelated) {
  const ChannelSet s = generated(2, Scheme::mimo2x2, 64, 1);
  const EmpiricalCorrelation c = empirical_block_R(s);
  EXPECT_NEAR(c.amplitude.matrix().cwiseAbs().minCoeff(), 1.0, 1e-12);
}

TEST(EmpiricalBlockR, SymmetricWithUnitDiagonal) {
  const ChannelSet s = generated(50, Scheme::mimo2x3, 32, 2);
  const EmpiricalCorrelation c = empirical_block_R(s);
  const Eigen::MatrixXd& a = c.amplitude.matrix();
  EXPECT_LE((a - a.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((a.diagonal().array() - 1.0).abs().maxCoeff(), 1e-12);
  // Synthetic phases are identical across modes, so their correlation is too.
  EXPECT_LE((c.phase.matrix() - c.phase.matrix().transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(AntiDiagonalAverage, Examples) {
  Eigen::MatrixXd b(2, 2);
  b << 1, 0.4, 0.6, 1;
  const auto p = antidiag_average(b);
  EXPECT_DOUBLE_EQ(p.values[0], 1.0);
  EXPECT_DOUBLE_EQ(p.values[1], 0.5);
  const auto id = antidiag_average(Eigen::MatrixXd::Identity(4, 4));
  EXPECT_EQ(id.values, (std::vector<double>{1, 0, 0, 0}));
  const AntiDiagonalProfile src{{1.0, 0.8, 0.3, -0.1, 0.05}, 62.5e3};
  const auto back = antidiag_average(toeplitz_block(src), 62.5e3);
  for (std::size_t d = 0; d < src.values.size(); ++d) EXPECT_NEAR(back.values[d], src.values[d], 1e-15);
}

TEST(UnwrapPhase, SingleJumpTriggersOnce) {
  std::vector<double> wrapped{0.0, 0.5, 1.0, 1.0 - kPi, 1.2 - kPi};
  // Step of exactly -pi between bins 2 and 3.
  std::vector<double> out;
  EXPECT_EQ(unwrap_phase(wrapped, out), 1u);
  EXPECT_NEAR(out[3], 1.0 + kPi, 1e-12);
  std::vector<double> smooth{0.1, 0.2, 0.3};
  EXPECT_EQ(unwrap_phase(smooth, out), 0u);
}

TEST(PhaseSlopes, SynthesizeAndInvert) {
  const MimoGrid g({"PN"}, {"P"}, 1588, 1.8e6, 62.5e3);
  ChannelSet set(g);
  for (double s : {1.133e-6, 0.0, 2.5e-6}) {
    const RealArray ph = phases_from_slope(g, s);
    CfrArray h(g);
    for (std::size_t n = 0; n < g.n_freq(); ++n) h(0, 0, n) = std::polar(0.01, ph(0, 0, n));
    set.realizations.push_back(h);
  }
  const auto slopes = extract_phase_slopes(set);
  ASSERT_EQ(slopes.size(), 3u);
  EXPECT_NEAR(slopes[0], 1.133e-6, 1e-9);
  EXPECT_NEAR(slopes[1], 0.0, 1e-15);
  EXPECT_NEAR(slopes[2], 2.5e-6, 1e-9);
  const auto robust = extract_phase_slopes(set, true);
  EXPECT_NEAR(robust[0], 1.133e-6, 1e-9);
}

TEST(CrossCorrelation, AmplitudeAndPhaseAreNearlyUncorrelated) {
  const ChannelSet s = generated(500, Scheme::mimo2x3, 40, 3);
  const Eigen::MatrixXd c = amplitude_phase_cross_correlation(s);
  const auto exceed = (c.array().abs() > 0.2).count();
  EXPECT_LE(static_cast<double>(exceed), 0.003 * static_cast<double>(c.size()));
}

TEST(Characterize, DecimatedRoundTripIsClose) {
  const ChannelSet s = generated(400, Scheme::mimo2x3, 4, 4);
  const CharacterizationResult r = characterize(s);
  EXPECT_EQ(r.n_realizations, 400u);
  EXPECT_TRUE(r.has_cm);
  EXPECT_TRUE(r.has_nocm);
  EXPECT_NEAR(r.params.mu.intercept_db, kPub.mu.intercept_db, 0.05 * 42.44);
  EXPECT_NEAR(r.params.mu.slope_db_per_ghz, kPub.mu.slope_db_per_ghz, 0.1 * 184.68);
  EXPECT_NEAR(r.params.sigma_nocm.intercept_db, kPub.sigma_nocm.intercept_db, 0.1 * 15.41);
  EXPECT_NEAR(r.params.gev.location, kPub.gev.location, 0.1 * kPub.gev.location);
  EXPECT_EQ(r.profiles.size(), 6u);
}

TEST(Characterize, MissingFamiliesKeepDefaults) {
  const ChannelSet s = generated(60, Scheme::siso, 8, 5);
  const CharacterizationResult r = characterize(s);
  EXPECT_FALSE(r.has_cm);
  EXPECT_EQ(r.params.sigma_cm, kPub.sigma_cm);
  EXPECT_EQ(r.params.antidiag_cm_power, kPub.antidiag_cm_power);
  EXPECT_FALSE(r.sigma_cm_fit.note.empty());
  EXPECT_THROW(characterize(generated(1, Scheme::siso, 8, 6)), InsufficientData);
}
