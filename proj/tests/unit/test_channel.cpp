#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "plcsynth/channel.hpp"
#include "plcsynth/error.hpp"

using namespace plcsynth;
constexpr double kPi = std::numbers::pi;

namespace {

MimoGrid small_grid() { return MimoGrid({"PN", "PE"}, {"P", "N", "CM"}, 4, 1e6, 1e5); }

CfrArray random_cfr(const MimoGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CfrArray h(g);
  for (auto& z : h.data()) z = Complex(u(rng), u(rng));
  return h;
}

}  // namespace

TEST(Reshape, RoundTripOnRandomArray) {
  const MimoGrid g = small_grid();
  const CfrArray h = random_cfr(g, 1);
  EXPECT_EQ(unreshape(reshape(h, g)), h);
}

TEST(Reshape, VectorRoundTrip) {
  const MimoGrid g = small_grid();
  ReshapedVector<double> v{g, {}};
  for (int k = 1; k <= 24; ++k) v.values.push_back(k);
  EXPECT_EQ(reshape(unreshape(v), g).values, v.values);
}

TEST(Reshape, PositionMapsBackToIndices) {
  const MimoGrid g = MimoGrid::default_2x3();
  ReshapedVector<double> v{g, std::vector<double>(g.size(), 0.0)};
  v.values[7949] = 1.0;  // 1-based p = 7950
  const RealArray a = unreshape(v);
  EXPECT_EQ(a(2, 1, 9), 1.0);
}

TEST(Reshape, SingleElementGridIsNotAllowedButSingleModeWorks) {
  const MimoGrid g({"PN"}, {"P"}, 2, 1e6, 1e5);
  ReshapedVector<double> v{g, {3.0, 4.0}};
  const RealArray a = unreshape(v);
  EXPECT_EQ(a(0, 0, 0), 3.0);
  EXPECT_EQ(a(0, 0, 1), 4.0);
}

TEST(Reshape, DimensionErrors) {
  const MimoGrid g = small_grid();
  EXPECT_THROW(reshape(CfrArray(1, 2, 4), g), InvalidInput);
  EXPECT_THROW(unreshape(ReshapedVector<double>{g, std::vector<double>(23)}), InvalidInput);
}

TEST(WrapPhase, Examples) {
  EXPECT_DOUBLE_EQ(wrap_phase(0.0), 0.0);
  EXPECT_DOUBLE_EQ(wrap_phase(kPi), -kPi);
  EXPECT_DOUBLE_EQ(wrap_phase(-kPi), -kPi);
  EXPECT_NEAR(wrap_phase(-7.5), -7.5 + 2 * kPi, 1e-12);  // -1.2168
  EXPECT_NEAR(wrap_phase(-7.5), -1.216814692820414, 1e-12);
  for (double x = -50.0; x < 50.0; x += 0.37) {
    const double w = wrap_phase(x);
    EXPECT_GE(w, -kPi);
    EXPECT_LT(w, kPi);
    EXPECT_NEAR(std::remainder(w - x, 2 * kPi), 0.0, 1e-9);
  }
}

TEST(SplitCfr, Examples) {
  const MimoGrid g({"PN"}, {"P"}, 3, 1e6, 1e5);
  CfrArray h(g);
  h(0, 0, 0) = 1.0;
  h(0, 0, 1) = -0.1;
  h(0, 0, 2) = 10.0 * std::polar(1.0, kPi / 4);
  const PolarSet p = split_cfr_db(ChannelSet(g, {h}));
  EXPECT_NEAR(p.amplitude_db[0](0, 0, 0), 0.0, 1e-12);
  EXPECT_NEAR(p.phase[0](0, 0, 0), 0.0, 1e-12);
  EXPECT_NEAR(p.amplitude_db[0](0, 0, 1), -20.0, 1e-12);
  EXPECT_DOUBLE_EQ(p.phase[0](0, 0, 1), -kPi);
  EXPECT_NEAR(p.amplitude_db[0](0, 0, 2), 20.0, 1e-12);
  EXPECT_NEAR(p.phase[0](0, 0, 2), kPi / 4, 1e-12);
}

TEST(SplitCfr, RejectsZeros) {
  const MimoGrid g({"PN"}, {"P"}, 2, 1e6, 1e5);
  CfrArray h(g, Complex(1.0, 0.0));
  h(0, 0, 1) = 0.0;
  EXPECT_THROW(split_cfr_db(ChannelSet(g, {h})), DegenerateChannel);
}

TEST(SplitCfr, RecombineIsIdentity) {
  const MimoGrid g = small_grid();
  ChannelSet set(g, {random_cfr(g, 2), random_cfr(g, 3)});
  const ChannelSet back = recombine(split_cfr_db(set));
  for (std::size_t r = 0; r < set.size(); ++r) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Complex a = set.realizations[r].data()[k];
      const Complex b = back.realizations[r].data()[k];
      EXPECT_LE(std::abs(a - b), 1e-12 * std::abs(a));
    }
  }
}

TEST(ChannelSet, ValidateAndSubset) {
  const MimoGrid g = small_grid();
  ChannelSet set(g, {random_cfr(g, 4)});
  EXPECT_NO_THROW(set.validate());
  const MimoGrid sub = g.subset({"PE"}, {"N", "CM"});
  const ChannelSet s = set.subset(sub);
  EXPECT_EQ(s.realizations[0](1, 0, 3), set.realizations[0](2, 1, 3));
  set.realizations[0](0, 0, 0) = Complex(std::nan(""), 0.0);
  EXPECT_THROW(set.validate(), InvalidInput);
  set.realizations[0](0, 0, 0) = 0.0;
  EXPECT_THROW(set.validate(), DegenerateChannel);
  set.realizations[0](0, 0, 0) = 1.0;
  set.realizations.emplace_back(1, 1, 4);
  EXPECT_THROW(set.validate(), InvalidInput);
}
