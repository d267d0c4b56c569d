#include "plcsynth/generator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "plcsynth/error.hpp"
#include "plcsynth/gev.hpp"
#include "plcsynth/parallel.hpp"
#include "plcsynth/sqrt_cache.hpp"

namespace plcsynth {

namespace {

// Realizations per batched matrix product. Fixed so that output does not
// depend on the worker count.
constexpr std::size_t kBatch = 16;

Eigen::MatrixXd draw_normals(std::size_t m, std::uint64_t seed, std::size_t begin,
                             std::size_t end, Substream stream) {
  Eigen::MatrixXd n(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(end - begin));
  for (std::size_t r = begin; r < end; ++r) {
    RandomStream rng(seed, r, stream);
    auto col = n.col(static_cast<Eigen::Index>(r - begin));
    for (Eigen::Index p = 0; p < col.size(); ++p) col(p) = rng.normal();
  }
  return n;
}

CfrArray assemble_cfr(const MimoGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& amp_db,
                      const RealArray& phase) {
  CfrArray h(grid);
  for (std::size_t i = 0; i < grid.n_tx(); ++i) {
    for (std::size_t j = 0; j < grid.n_rx(); ++j) {
      for (std::size_t n = 0; n < grid.n_freq(); ++n) {
        const double a = amp_db(static_cast<Eigen::Index>(grid.index(n, i, j)));
        h(j, i, n) = std::polar(std::pow(10.0, a / 20.0), phase(j, i, n));
      }
    }
  }
  return h;
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

void GeneratorConfig::validate() const {
  if (n_realizations < 1) throw InvalidInput("generator: n_realizations must be at least 1");
  if (decimation < 1) throw InvalidInput("generator: decimation must be at least 1");
  MimoGrid::default_2x3().decimated(decimation);
}

void EmpiricalMatrices::validate() const {
  const auto m = static_cast<Eigen::Index>(grid.size());
  if (amplitude_covariance.rows() != m || amplitude_covariance.cols() != m ||
      phase_correlation.rows() != m || phase_correlation.cols() != m ||
      amplitude_mean.size() != m) {
    throw InvalidInput("empirical matrices do not match the grid (M = " + std::to_string(m) + ")");
  }
}

Eigen::VectorXd gen_amplitudes(const Eigen::MatrixXd& s, const Eigen::VectorXd& mu,
                               RandomStream& rng) {
  if (s.rows() != s.cols() || s.rows() != mu.size()) {
    throw InvalidInput("gen_amplitudes: covariance root and mean vector sizes differ");
  }
  Eigen::VectorXd n(mu.size());
  for (Eigen::Index p = 0; p < n.size(); ++p) n(p) = rng.normal();
  return s * n + mu;
}

double sample_phase_slope(const GevParameters& gev, RandomStream& rng) {
  return gev::sample(gev, rng);
}

RealArray phases_from_slope(const MimoGrid& grid, double slope) {
  RealArray phase(grid);
  for (std::size_t n = 0; n < grid.n_freq(); ++n) {
    const double phi = wrap_phase(-slope * grid.frequency(n));
    for (std::size_t j = 0; j < grid.n_rx(); ++j) {
      for (std::size_t i = 0; i < grid.n_tx(); ++i) phase(j, i, n) = phi;
    }
  }
  return phase;
}

RealArray gen_phases(const MimoGrid& grid, const GevParameters& gev, RandomStream& rng) {
  return phases_from_slope(grid, sample_phase_slope(gev, rng));
}

double copula_gaussian_correlation(double rho_target) {
  return 2.0 * std::sin(std::numbers::pi * rho_target / 6.0);
}

MimoGrid generation_grid(const GeneratorConfig& config) {
  return MimoGrid::for_scheme(config.scheme, config.decimation);
}

ChannelSet generate(const GeneratorConfig& config, const ModelParameters& params) {
  config.validate();
  params.validate();
  const MimoGrid grid = generation_grid(config);
  const PsdSqrt root = amplitude_covariance_sqrt(params, grid, config.exponential_cm_refinement,
                                                 config.cache_dir);
  return generate(config, params, grid, root.root);
}

ChannelSet generate(const GeneratorConfig& config, const ModelParameters& params,
                    const MimoGrid& grid, const Eigen::MatrixXd& amplitude_root) {
  config.validate();
  params.validate();
  const auto m = static_cast<Eigen::Index>(grid.size());
  if (amplitude_root.rows() != m || amplitude_root.cols() != m) {
    throw InvalidInput("generate: covariance root does not match the grid");
  }
  const Eigen::VectorXd mu = mu_vector(params, grid);

  ChannelSet set(grid, std::vector<CfrArray>(config.n_realizations));
  parallel_chunks(config.n_realizations, kBatch, config.threads,
                  [&](std::size_t begin, std::size_t end) {
                    Eigen::MatrixXd amp = amplitude_root *
                                          draw_normals(grid.size(), config.seed, begin, end,
                                                       Substream::amplitude);
                    amp.colwise() += mu;
                    for (std::size_t r = begin; r < end; ++r) {
                      RandomStream phase_rng(config.seed, r, Substream::phase);
                      const RealArray phase = gen_phases(grid, params.gev, phase_rng);
                      set.realizations[r] =
                          assemble_cfr(grid, amp.col(static_cast<Eigen::Index>(r - begin)), phase);
                    }
                  });
  return set;
}

ChannelSet generate_copula(const GeneratorConfig& config, const EmpiricalMatrices& matrices,
                           PsdRepairReport* amplitude_report, PsdRepairReport* phase_report) {
  config.validate();
  matrices.validate();
  const MimoGrid& grid = matrices.grid;

  PsdSqrt amp_root = psd_sqrt(matrices.amplitude_covariance);
  Eigen::MatrixXd rz = matrices.phase_correlation.unaryExpr(
      [](double rho) { return copula_gaussian_correlation(rho); });
  PsdSqrt phase_root = psd_sqrt(std::move(rz));
  if (amplitude_report) *amplitude_report = amp_root.report;
  if (phase_report) *phase_report = phase_root.report;

  ChannelSet set(grid, std::vector<CfrArray>(config.n_realizations));
  parallel_chunks(
      config.n_realizations, kBatch, config.threads, [&](std::size_t begin, std::size_t end) {
        Eigen::MatrixXd amp =
            amp_root.root * draw_normals(grid.size(), config.seed, begin, end, Substream::amplitude);
        amp.colwise() += matrices.amplitude_mean;
        const Eigen::MatrixXd z =
            phase_root.root * draw_normals(grid.size(), config.seed, begin, end, Substream::phase);
        for (std::size_t r = begin; r < end; ++r) {
          const auto col = static_cast<Eigen::Index>(r - begin);
          RealArray phase(grid);
          for (std::size_t i = 0; i < grid.n_tx(); ++i) {
            for (std::size_t j = 0; j < grid.n_rx(); ++j) {
              for (std::size_t n = 0; n < grid.n_freq(); ++n) {
                const double u = standard_normal_cdf(z(static_cast<Eigen::Index>(grid.index(n, i, j)), col));
                phase(j, i, n) = wrap_phase(-std::numbers::pi + 2.0 * std::numbers::pi * u);
              }
            }
          }
          set.realizations[r] = assemble_cfr(grid, amp.col(col), phase);
        }
      });
  return set;
}

}  // namespace plcsynth
