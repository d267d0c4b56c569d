#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "plcsynth/grid.hpp"
#include "plcsynth/parameters.hpp"

namespace plcsynth {

// Correlation as a function of frequency lag: values[d] is r(d * lag_step_hz).
struct AntiDiagonalProfile {
  std::vector<double> values;
  double lag_step_hz = 0.0;
};

// r(0) = 1 and r(d) = clamp(a (d df)^b + c, 0, 1). With the exponential
// refinement enabled, CM profiles add a_e exp(b_e d df) + c_e from the
// activation threshold on.
AntiDiagonalProfile antidiag_profile(const ModelParameters& params, bool is_cm,
                                     const MimoGrid& grid, bool exp_refinement = false);

// Symmetric Toeplitz matrix with entry (m, n) = r(|m - n|).
Eigen::MatrixXd toeplitz_block(const AntiDiagonalProfile& profile);

// Cross-combination block from the two diagonal blocks:
//   (R_ii R_jj / n_freq + R_ii o R_jj) / 2.
Eigen::MatrixXd offdiag_block(const Eigen::MatrixXd& r_ii, const Eigen::MatrixXd& r_jj);

enum class CovarianceKind { normalized, covariance };

// M x M matrix viewed as n_comb x n_comb blocks of n_freq x n_freq entries,
// rows and columns in reshape order.
class BlockCovariance {
 public:
  BlockCovariance(MimoGrid grid, CovarianceKind kind, Eigen::MatrixXd matrix);

  const MimoGrid& grid() const { return grid_; }
  CovarianceKind kind() const { return kind_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  Eigen::MatrixXd& matrix() { return matrix_; }
  Eigen::MatrixXd release() { return std::move(matrix_); }

  std::size_t n_blocks() const { return grid_.n_combinations(); }
  auto block(std::size_t i, std::size_t j) const {
    const auto nf = static_cast<Eigen::Index>(grid_.n_freq());
    return matrix_.block(static_cast<Eigen::Index>(i) * nf, static_cast<Eigen::Index>(j) * nf, nf, nf);
  }

  // Entries of the Eq.-(6)-style off-diagonal blocks that fell outside [-1, 1]
  // and were clamped during assembly.
  std::size_t n_clamped_entries = 0;

 private:
  MimoGrid grid_;
  CovarianceKind kind_;
  Eigen::MatrixXd matrix_;
};

// Normalized amplitude covariance: Toeplitz diagonal blocks from the
// anti-diagonal fits, off-diagonal blocks from offdiag_block.
BlockCovariance assemble_R(const ModelParameters& params, const MimoGrid& grid,
                           bool exp_refinement = false);

// Rebuilds the off-diagonal blocks of R from its diagonal blocks alone.
BlockCovariance regenerate_offdiagonal(const BlockCovariance& r);

// Q = R o (sigma sigma^T), sigma reshaped from sigma_profile. Consumes R.
BlockCovariance scale_to_Q(BlockCovariance r, const ModelParameters& params);

// Reshaped standard-deviation vector used by scale_to_Q.
Eigen::VectorXd sigma_vector(const ModelParameters& params, const MimoGrid& grid);
// Reshaped mean vector.
Eigen::VectorXd mu_vector(const ModelParameters& params, const MimoGrid& grid);

struct PsdRepairReport {
  double min_eigenvalue_before = 0.0;
  std::size_t n_clamped = 0;
  // ||Q_repaired - Q||_F / ||Q||_F.
  double frobenius_change = 0.0;
};

struct PsdSqrt {
  Eigen::MatrixXd root;
  PsdRepairReport report;
};

// Symmetric square root V diag(sqrt(max(lambda, 0))) V^T of a symmetric
// matrix. Negative eigenvalues are clamped to zero and counted. Consumes q.
PsdSqrt psd_sqrt(Eigen::MatrixXd q);

}  // namespace plcsynth
