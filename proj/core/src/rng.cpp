#include "plcsynth/rng.hpp"

namespace plcsynth {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t realization,
                           Substream stream)
    : RandomStream(mix64(mix64(mix64(master_seed) ^ realization) ^
                         static_cast<std::uint64_t>(stream))) {}

RandomStream::RandomStream(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(mix64(seed)),
                    static_cast<std::uint32_t>(mix64(seed) >> 32)};
  engine_.seed(seq);
}

double RandomStream::uniform_open() {
  // 53 random bits mapped to the centers of 2^53 equal cells.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace plcsynth
