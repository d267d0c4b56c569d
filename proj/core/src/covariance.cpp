#include "plcsynth/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <cblas.h>
#include <lapacke.h>

#include "plcsynth/error.hpp"

namespace plcsynth {

AntiDiagonalProfile antidiag_profile(const ModelParameters& params, bool is_cm,
                                     const MimoGrid& grid, bool exp_refinement) {
  const CurveCoefficients& power = is_cm ? params.antidiag_cm_power : params.antidiag_nocm;
  const bool with_tail = is_cm && exp_refinement;
  AntiDiagonalProfile out{std::vector<double>(grid.n_freq()), grid.f_step()};
  out.values[0] = 1.0;
  for (std::size_t d = 1; d < grid.n_freq(); ++d) {
    const double lag = static_cast<double>(d) * grid.f_step();
    double r = power.power(lag);
    // The tail is fitted so that it vanishes at the threshold; applying it
    // from the threshold on keeps the profile continuous.
    if (with_tail && lag >= params.cm_exp_threshold_hz) {
      r += params.antidiag_cm_exp.exponential(lag);
    }
    if (!std::isfinite(r)) {
      throw ParameterError("anti-diagonal fit is not finite at lag " + std::to_string(lag) + " Hz");
    }
    out.values[d] = std::clamp(r, 0.0, 1.0);
  }
  return out;
}

Eigen::MatrixXd toeplitz_block(const AntiDiagonalProfile& profile) {
  const auto n = static_cast<Eigen::Index>(profile.values.size());
  Eigen::MatrixXd t(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    for (Eigen::Index row = 0; row < n; ++row) {
      t(row, col) = profile.values[static_cast<std::size_t>(std::abs(row - col))];
    }
  }
  return t;
}

Eigen::MatrixXd offdiag_block(const Eigen::MatrixXd& r_ii, const Eigen::MatrixXd& r_jj) {
  if (r_ii.rows() != r_ii.cols() || r_jj.rows() != r_jj.cols() || r_ii.rows() != r_jj.rows()) {
    throw InvalidInput("offdiag_block: blocks must be square and of equal size");
  }
  const double n_freq = static_cast<double>(r_ii.rows());
  Eigen::MatrixXd out = r_ii * r_jj;
  out /= n_freq;
  out += r_ii.cwiseProduct(r_jj);
  out *= 0.5;
  return out;
}

BlockCovariance::BlockCovariance(MimoGrid grid, CovarianceKind kind, Eigen::MatrixXd matrix)
    : grid_(std::move(grid)), kind_(kind), matrix_(std::move(matrix)) {
  const auto m = static_cast<Eigen::Index>(grid_.size());
  if (matrix_.rows() != m || matrix_.cols() != m) {
    throw InvalidInput("BlockCovariance: matrix is not M x M for the grid");
  }
}

namespace {

// Copies the off-diagonal blocks of the upper triangle, clamped to [-1, 1],
// and mirrors them into the lower triangle.
std::size_t fill_offdiagonal(Eigen::MatrixXd& r, const std::vector<Eigen::MatrixXd>& diag,
                             Eigen::Index nf) {
  std::size_t clamped = 0;
  const auto nb = static_cast<Eigen::Index>(diag.size());
  for (Eigen::Index i = 0; i < nb; ++i) {
    for (Eigen::Index j = i + 1; j < nb; ++j) {
      Eigen::MatrixXd b = offdiag_block(diag[static_cast<std::size_t>(i)],
                                        diag[static_cast<std::size_t>(j)]);
      for (Eigen::Index k = 0; k < b.size(); ++k) {
        double& v = b.data()[k];
        if (v > 1.0 || v < -1.0) {
          v = std::clamp(v, -1.0, 1.0);
          ++clamped;
        }
      }
      r.block(i * nf, j * nf, nf, nf) = b;
      r.block(j * nf, i * nf, nf, nf) = b.transpose();
    }
  }
  return clamped;
}

}  // namespace

BlockCovariance assemble_R(const ModelParameters& params, const MimoGrid& grid,
                           bool exp_refinement) {
  params.validate();
  const auto nf = static_cast<Eigen::Index>(grid.n_freq());
  const auto m = static_cast<Eigen::Index>(grid.size());

  // At most two distinct diagonal blocks exist: CM and non-CM.
  Eigen::MatrixXd block_nocm, block_cm;
  std::vector<Eigen::MatrixXd> diag;
  for (const ModeCombination& combo : grid.combinations()) {
    Eigen::MatrixXd& cached = combo.is_cm() ? block_cm : block_nocm;
    if (cached.size() == 0) {
      cached = toeplitz_block(antidiag_profile(params, combo.is_cm(), grid, exp_refinement));
    }
    diag.push_back(cached);
  }

  Eigen::MatrixXd r(m, m);
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const auto o = static_cast<Eigen::Index>(i) * nf;
    r.block(o, o, nf, nf) = diag[i];
  }
  const std::size_t clamped = fill_offdiagonal(r, diag, nf);
  BlockCovariance out(grid, CovarianceKind::normalized, std::move(r));
  out.n_clamped_entries = clamped;
  return out;
}

BlockCovariance regenerate_offdiagonal(const BlockCovariance& r) {
  const auto nf = static_cast<Eigen::Index>(r.grid().n_freq());
  std::vector<Eigen::MatrixXd> diag;
  for (std::size_t i = 0; i < r.n_blocks(); ++i) diag.emplace_back(r.block(i, i));
  Eigen::MatrixXd out = r.matrix();
  const std::size_t clamped = fill_offdiagonal(out, diag, nf);
  BlockCovariance result(r.grid(), r.kind(), std::move(out));
  result.n_clamped_entries = clamped;
  return result;
}

Eigen::VectorXd sigma_vector(const ModelParameters& params, const MimoGrid& grid) {
  Eigen::VectorXd s(static_cast<Eigen::Index>(grid.size()));
  for (const ModeCombination& combo : grid.combinations()) {
    for (std::size_t n = 0; n < grid.n_freq(); ++n) {
      s(static_cast<Eigen::Index>(combo.index * grid.n_freq() + n)) =
          sigma_profile(params, grid.frequency(n), combo);
    }
  }
  return s;
}

Eigen::VectorXd mu_vector(const ModelParameters& params, const MimoGrid& grid) {
  Eigen::VectorXd mu(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.n_combinations(); ++k) {
    for (std::size_t n = 0; n < grid.n_freq(); ++n) {
      mu(static_cast<Eigen::Index>(k * grid.n_freq() + n)) = mu_profile(params, grid.frequency(n));
    }
  }
  return mu;
}

BlockCovariance scale_to_Q(BlockCovariance r, const ModelParameters& params) {
  if (r.kind() != CovarianceKind::normalized) {
    throw InvalidInput("scale_to_Q: input is already a covariance");
  }
  const Eigen::VectorXd sigma = sigma_vector(params, r.grid());
  Eigen::MatrixXd q = r.release();
  for (Eigen::Index col = 0; col < q.cols(); ++col) {
    q.col(col).array() *= sigma.array() * sigma(col);
  }
  BlockCovariance out(r.grid(), CovarianceKind::covariance, std::move(q));
  out.n_clamped_entries = r.n_clamped_entries;
  return out;
}

PsdSqrt psd_sqrt(Eigen::MatrixXd q) {
  if (q.rows() != q.cols()) throw InvalidInput("psd_sqrt: matrix is not square");
  const lapack_int n = static_cast<lapack_int>(q.rows());
  if (n == 0) return {Eigen::MatrixXd(), {}};
  if (!q.allFinite()) throw NumericalError("psd_sqrt: matrix has non-finite entries");

  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, n);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  // Only the upper triangle is referenced; q is destroyed.
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'A', 'U', n, q.data(), n, 0.0, 0.0, 0, 0, 0.0,
                     &found, w.data(), z.data(), n, support.data());
  if (info != 0 || found != n) {
    throw NumericalError("psd_sqrt: symmetric eigendecomposition failed (dsyevr info = " +
                         std::to_string(info) + ", eigenvalues found = " +
                         std::to_string(found) + " of " + std::to_string(n) + ")");
  }

  PsdRepairReport report;
  report.min_eigenvalue_before = w.minCoeff();
  double total = 0.0, removed = 0.0;
  for (lapack_int k = 0; k < n; ++k) {
    total += w(k) * w(k);
    if (w(k) < 0.0) {
      removed += w(k) * w(k);
      w(k) = 0.0;
      ++report.n_clamped;
    }
  }
  report.frobenius_change = total > 0.0 ? std::sqrt(removed / total) : 0.0;

  // S = (Z L^{1/4}) (Z L^{1/4})^T, written into q's storage.
  for (lapack_int k = 0; k < n; ++k) z.col(k) *= std::sqrt(std::sqrt(w(k)));
  cblas_dsyrk(CblasColMajor, CblasUpper, CblasNoTrans, n, n, 1.0, z.data(), n, 0.0, q.data(), n);
  for (Eigen::Index col = 0; col < n; ++col) {
    for (Eigen::Index row = col + 1; row < n; ++row) q(row, col) = q(col, row);
  }
  return {std::move(q), report};
}

}  // namespace plcsynth
