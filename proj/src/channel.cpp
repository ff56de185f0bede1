#include "greenmimo/channel.hpp"

#include <cmath>

#include "greenmimo/errors.hpp"
#include "greenmimo/rng.hpp"

namespace greenmimo {

namespace {

Eigen::MatrixXcd sample_complex_gaussian(int rows, int cols, GaussianSampler& g) {
  Eigen::MatrixXcd m(rows, cols);
  // column-major fill order so the draw sequence is part of the contract
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = g.complex_normal();
  return m;
}

}  // namespace

ChannelRealization sample_channel(const SystemConfig& cfg, std::uint64_t seed) {
  const int n = cfg.stream_count();
  GaussianSampler g(mix_seed(seed, 0x6368616eULL, 0));

  ChannelRealization real;
  real.H_hat = sample_complex_gaussian(cfg.N_r, n, g);
  real.Omega = sample_complex_gaussian(cfg.N_r, n, g);
  const double w = std::sqrt(1.0 - cfg.tau * cfg.tau);
  real.H = w * real.H_hat + cfg.tau * real.Omega;

  Eigen::MatrixXcd gram = real.H_hat.adjoint() * real.H_hat;
  gram = 0.5 * (gram + gram.adjoint().eval());  // enforce exact Hermitian
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
  real.eigenvalues = eig.eigenvalues();
  real.eigenvectors = eig.eigenvectors();

  const double lambda_max = real.eigenvalues.size() > 0
                                ? real.eigenvalues.maxCoeff()
                                : 0.0;
  const double floor = 1e-12 * std::max(lambda_max, 0.0);
  for (Eigen::Index i = 0; i < real.eigenvalues.size(); ++i)
    if (real.eigenvalues[i] < floor) real.eigenvalues[i] = 0.0;

  return real;
}

Eigen::VectorXcd simulate_received_symbols(const ChannelRealization& real,
                                           const Eigen::VectorXd& powers,
                                           const Eigen::VectorXcd& symbols,
                                           double sigma2,
                                           std::uint64_t noise_seed) {
  const Eigen::Index n = real.H.cols();
  if (powers.size() != n || symbols.size() != n)
    fail(ErrorKind::Structural,
         "powers/symbols length must equal the stream count " + std::to_string(n));
  for (Eigen::Index i = 0; i < n; ++i)
    if (powers[i] < 0.0) fail(ErrorKind::Structural, "negative stream power");

  Eigen::VectorXcd scaled = powers.array().sqrt().matrix().cast<std::complex<double>>()
                                .cwiseProduct(symbols);
  Eigen::VectorXcd y = real.H * scaled;
  if (sigma2 > 0.0) {
    GaussianSampler g(mix_seed(noise_seed, 0x6e6f6973ULL, 1));
    const double s = std::sqrt(sigma2);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += s * g.complex_normal();
  }
  return y;
}

Eigen::MatrixXcd sample_haar_unitary(int n, std::mt19937_64& engine) {
  // Ginibre + QR with phase-fixed R diagonal gives the Haar measure.
  Eigen::MatrixXcd ginibre(n, n);
  const double s = 0.70710678118654752440;
  auto uniform = [&engine]() {
    return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
  };
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) {
      double u1 = uniform();
      double u2 = uniform();
      double mag = std::sqrt(-2.0 * std::log(u1));
      double ang = 6.283185307179586476925286766559 * u2;
      ginibre(r, c) = std::complex<double>(s * mag * std::cos(ang),
                                           s * mag * std::sin(ang));
    }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    std::complex<double> d = r(i, i);
    double a = std::abs(d);
    std::complex<double> phase = a > 0.0 ? d / a : std::complex<double>(1.0, 0.0);
    q.col(i) *= phase;
  }
  return q;
}

double frobenius_norm_sq(const Eigen::Ref<const Eigen::MatrixXcd>& m) {
  return m.squaredNorm();
}

double max_column_norm_sq(const Eigen::Ref<const Eigen::MatrixXcd>& m,
                          int* argmax) {
  double best = -1.0;
  int best_j = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double v = m.col(j).squaredNorm();
    if (v > best) {  // ties keep the lowest index
      best = v;
      best_j = static_cast<int>(j);
    }
  }
  if (argmax != nullptr) *argmax = best_j;
  return best;
}

}  // namespace greenmimo
