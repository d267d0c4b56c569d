#pragma once

#include <cstdint>
#include <random>

namespace plcsynth {

// Stream identifiers within one realization.
enum class Substream : std::uint64_t { amplitude = 1, phase = 2 };

// Independent random stream derived from (master seed, realization index,
// substream id) by counter-based mixing, so realization k draws the same
// numbers no matter which worker generates it.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t realization, Substream stream);
  explicit RandomStream(std::uint64_t seed);

  double normal() { return normal_(engine_); }
  // Uniform on the open interval (0, 1).
  double uniform_open();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace plcsynth
