#include "plcsynth/sqrt_cache.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "plcsynth/atomic_file.hpp"
#include "plcsynth/error.hpp"

namespace plcsynth {

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'L', 'C', 'S', 'Q', 'R', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

}  // namespace

SqrtCacheKey SqrtCacheKey::make(const ModelParameters& params, const MimoGrid& grid,
                                bool exp_refinement) {
  return {params.covariance_hash(exp_refinement), grid.hash(), grid.size()};
}

std::filesystem::path sqrt_cache_file(const std::filesystem::path& dir, const SqrtCacheKey& key) {
  char name[64];
  std::snprintf(name, sizeof name, "sqrt-%016llx-%016llx.bin",
                static_cast<unsigned long long>(key.params_hash),
                static_cast<unsigned long long>(key.grid_hash));
  return dir / name;
}

void save_sqrt_cache(const std::filesystem::path& file, const SqrtCacheKey& key, const PsdSqrt& s) {
  const auto m = static_cast<Eigen::Index>(key.m);
  if (s.root.rows() != m || s.root.cols() != m) {
    throw InvalidInput("covariance cache: matrix size does not match key");
  }
  write_atomically(
      file,
      [&](std::ostream& out) {
        out.write(kMagic.data(), kMagic.size());
        put(out, kVersion);
        put(out, std::uint32_t{0});
        put(out, key.m);
        put(out, key.params_hash);
        put(out, key.grid_hash);
        put(out, s.report.min_eigenvalue_before);
        put(out, static_cast<std::uint64_t>(s.report.n_clamped));
        put(out, s.report.frobenius_change);
        // The root is symmetric, so column-major storage is also row-major.
        out.write(reinterpret_cast<const char*>(s.root.data()),
                  static_cast<std::streamsize>(s.root.size() * sizeof(double)));
      },
      true);
}

std::optional<PsdSqrt> load_sqrt_cache(const std::filesystem::path& file, const SqrtCacheKey& key) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) return std::nullopt;
  if (get<std::uint32_t>(in) != kVersion) return std::nullopt;
  get<std::uint32_t>(in);
  SqrtCacheKey stored;
  stored.m = get<std::uint64_t>(in);
  stored.params_hash = get<std::uint64_t>(in);
  stored.grid_hash = get<std::uint64_t>(in);
  if (!in) return std::nullopt;
  if (stored.m != key.m || stored.params_hash != key.params_hash ||
      stored.grid_hash != key.grid_hash) {
    return std::nullopt;
  }
  PsdSqrt s;
  s.report.min_eigenvalue_before = get<double>(in);
  s.report.n_clamped = static_cast<std::size_t>(get<std::uint64_t>(in));
  s.report.frobenius_change = get<double>(in);
  const auto m = static_cast<Eigen::Index>(key.m);
  s.root.resize(m, m);
  in.read(reinterpret_cast<char*>(s.root.data()),
          static_cast<std::streamsize>(s.root.size() * sizeof(double)));
  if (!in) return std::nullopt;  // truncated; recompute
  return s;
}

PsdSqrt amplitude_covariance_sqrt(const ModelParameters& params, const MimoGrid& grid,
                                  bool exp_refinement,
                                  const std::optional<std::filesystem::path>& cache_dir) {
  const SqrtCacheKey key = SqrtCacheKey::make(params, grid, exp_refinement);
  std::filesystem::path file;
  if (cache_dir) {
    file = sqrt_cache_file(*cache_dir, key);
    if (auto hit = load_sqrt_cache(file, key)) return std::move(*hit);
  }
  PsdSqrt s = psd_sqrt(scale_to_Q(assemble_R(params, grid, exp_refinement), params).release());
  if (cache_dir) save_sqrt_cache(file, key, s);
  return s;
}

}  // namespace plcsynth
