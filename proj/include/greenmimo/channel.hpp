#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "greenmimo/config.hpp"

namespace greenmimo {

/// One Rayleigh-fading channel draw with imperfect CSI.
///
/// H = sqrt(1-tau^2) * H_hat + tau * Omega holds exactly. eigenvalues/Q form
/// the eigendecomposition of H_hat^H H_hat; eigenvalues below
/// 1e-12 * max(lambda) are clamped to exactly zero (rank-deficient Gram
/// matrices are generic whenever N_t*K > N_r).
struct ChannelRealization {
  Eigen::MatrixXcd H_hat;   ///< estimated CSI, N_r x (N_t*K)
  Eigen::MatrixXcd Omega;   ///< estimation-error term, same shape
  Eigen::MatrixXcd H;       ///< true channel, same shape
  Eigen::VectorXd eigenvalues;   ///< lambda of H_hat^H H_hat, length N_t*K
  Eigen::MatrixXcd eigenvectors; ///< unitary Q, (N_t*K) x (N_t*K)

  /// Columns of the true channel belonging to user i (0-based).
  Eigen::MatrixXcd user_block(int i, int N_t) const {
    return H.middleCols(static_cast<Eigen::Index>(i) * N_t, N_t);
  }
};

/// Draws H_hat and Omega with i.i.d. CN(0,1) entries and composes H.
/// Identical seeds reproduce the realization bit for bit.
ChannelRealization sample_channel(const SystemConfig& cfg, std::uint64_t seed);

/// y = H * diag(sqrt(powers)) * symbols + n with n ~ CN(0, sigma2 I).
/// Throws Error{Structural} on dimension mismatch.
Eigen::VectorXcd simulate_received_symbols(const ChannelRealization& real,
                                           const Eigen::VectorXd& powers,
                                           const Eigen::VectorXcd& symbols,
                                           double sigma2,
                                           std::uint64_t noise_seed);

/// Haar-distributed n x n unitary matrix: QR of a complex Ginibre draw with
/// the R diagonal phase-normalized.
Eigen::MatrixXcd sample_haar_unitary(int n, std::mt19937_64& engine);

/// Squared Frobenius norm and largest squared column norm of a block.
double frobenius_norm_sq(const Eigen::Ref<const Eigen::MatrixXcd>& m);
double max_column_norm_sq(const Eigen::Ref<const Eigen::MatrixXcd>& m,
                          int* argmax = nullptr);

}  // namespace greenmimo
