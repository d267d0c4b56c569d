#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "plcsynth/covariance.hpp"

namespace plcsynth {

// Identifies a cached covariance square root.
struct SqrtCacheKey {
  std::uint64_t params_hash = 0;
  std::uint64_t grid_hash = 0;
  std::uint64_t m = 0;

  static SqrtCacheKey make(const ModelParameters& params, const MimoGrid& grid,
                           bool exp_refinement);
};

// Binary layout, little-endian host order:
//   char[8] magic "PLCSQRT1", u32 version, u32 reserved, u64 M,
//   u64 params_hash, u64 grid_hash, f64 min_eigenvalue_before, u64 n_clamped,
//   f64 frobenius_change, then M*M f64 row-major.
std::filesystem::path sqrt_cache_file(const std::filesystem::path& dir, const SqrtCacheKey& key);
void save_sqrt_cache(const std::filesystem::path& file, const SqrtCacheKey& key, const PsdSqrt& s);
// Returns nullopt when the file is missing or was written for another key;
// throws Error on a truncated or corrupt file.
std::optional<PsdSqrt> load_sqrt_cache(const std::filesystem::path& file, const SqrtCacheKey& key);

// Square root of the synthetic amplitude covariance Q for `grid`. When
// `cache_dir` is set, reuses or stores the result there.
PsdSqrt amplitude_covariance_sqrt(const ModelParameters& params, const MimoGrid& grid,
                                  bool exp_refinement,
                                  const std::optional<std::filesystem::path>& cache_dir = {});

}  // namespace plcsynth
