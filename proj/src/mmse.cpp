#include "greenmimo/mmse.hpp"

#include <cmath>
#include <string>

#include "greenmimo/errors.hpp"
#include "greenmimo/rng.hpp"

namespace greenmimo {

bool ModulationAllocation::is_integral() const {
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      if (b(i, j) != std::floor(b(i, j))) return false;
  return true;
}

void ModulationAllocation::validate() const {
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      if (b(i, j) < b_min - 1e-9)
        fail(ErrorKind::Structural, "allocation below b_min");
      row += b(i, j);
    }
    if (std::abs(row - b_total) > 1e-9)
      fail(ErrorKind::Structural, "allocation row sum differs from b_total");
  }
}

double sinr_per_stream(double p_ij, double P_total, const SpectralSummary& spec,
                       double sigma2) {
  if (p_ij < 0.0 || p_ij > P_total + 1e-12 * std::max(1.0, P_total))
    fail(ErrorKind::Structural, "need 0 <= p_ij <= P");
  const double one_minus_tau2 = 1.0 - spec.tau * spec.tau;
  const double nn1 = static_cast<double>(spec.n) * (spec.n + 1);
  const double num = p_ij * one_minus_tau2 * (spec.f1 + spec.f2);
  const double den = (P_total - p_ij) * one_minus_tau2 *
                         (spec.f2 - spec.n * spec.f1) / (1.0 - spec.n) +
                     nn1 * p_ij * spec.tau * spec.tau * spec.f3 +
                     nn1 * sigma2 * spec.f3;
  if (den == 0.0) {
    if (num == 0.0) return 0.0;
    fail(ErrorKind::DegenerateChannel, "zero SINR denominator");
  }
  return num / den;
}

double stream_power(double eta_val, double P_total, const SpectralSummary& spec,
                    double sigma2) {
  if (eta_val < 0.0) fail(ErrorKind::Structural, "eta must be >= 0");
  if (eta_val == 0.0) return 0.0;
  const double den = spec.c1 + eta_val * spec.c2;
  if (!(den > 0.0))
    fail(ErrorKind::InfeasiblePower,
         "per-stream power denominator c1 + eta*c2 = " + std::to_string(den) +
             " is nonpositive");
  return eta_val * (spec.c3 * P_total + spec.f3 * spec.sigma_hat_sq(sigma2)) / den;
}

double total_power_fixed_point(
    const std::vector<std::pair<double, double>>& weighted_etas,
    const SpectralSummary& spec, double sigma2) {
  double s = 0.0;
  for (const auto& [w, eta_val] : weighted_etas) {
    if (eta_val < 0.0) fail(ErrorKind::Structural, "eta must be >= 0");
    if (eta_val == 0.0 || w == 0.0) continue;
    const double den = spec.c2 + spec.c1 / eta_val;
    if (!(den > 0.0))
      fail(ErrorKind::InfeasiblePower,
           "stream group with eta = " + std::to_string(eta_val) +
               " has nonpositive denominator c2 + c1/eta");
    s += w / den;
  }
  const double psi = 1.0 - spec.c3 * s;
  if (!(psi > 0.0))
    fail(ErrorKind::Infeasible,
         "no finite power supports the requested rates on this channel "
         "(1 - c3*sum = " + std::to_string(psi) + ")");
  return spec.f3 * spec.sigma_hat_sq(sigma2) * s / psi;
}

StreamPowerResult total_mimo_power(const ModulationAllocation& alloc,
                                   const SpectralSummary& spec,
                                   const SystemConfig& cfg,
                                   const std::vector<double>& per_user_ser) {
  alloc.validate();
  if (static_cast<int>(per_user_ser.size()) != cfg.K)
    fail(ErrorKind::Structural, "per_user_ser length must equal K");

  Eigen::MatrixXd etas(cfg.K, cfg.N_t);
  std::vector<std::pair<double, double>> weighted;
  weighted.reserve(static_cast<std::size_t>(cfg.K) * cfg.N_t);
  for (int i = 0; i < cfg.K; ++i)
    for (int j = 0; j < cfg.N_t; ++j) {
      etas(i, j) = eta(alloc.b(i, j), per_user_ser[static_cast<std::size_t>(i)],
                       cfg.R_s, cfg.B);
      weighted.emplace_back(1.0, etas(i, j));
    }

  StreamPowerResult result;
  result.P_total = total_power_fixed_point(weighted, spec, cfg.sigma2);
  result.p.resize(cfg.K, cfg.N_t);
  for (int i = 0; i < cfg.K; ++i)
    for (int j = 0; j < cfg.N_t; ++j)
      result.p(i, j) = stream_power(etas(i, j), result.P_total, spec, cfg.sigma2);
  return result;
}

std::pair<double, int> refine_alpha_fixed_point(
    const Eigen::Ref<const Eigen::VectorXd>& lambda, double tau, double sigma2,
    double P_ref, const std::vector<std::pair<double, double>>& weighted_etas) {
  double p_prev = P_ref;
  double p = 0.0;
  int rounds = 0;
  for (; rounds < 50; ++rounds) {
    SpectralSummary spec = spectral_functions(lambda, sigma2 / p_prev, tau);
    p = total_power_fixed_point(weighted_etas, spec, sigma2);
    if (std::abs(p - p_prev) < 1e-6 * std::max(p, 1e-300)) {
      ++rounds;
      break;
    }
    p_prev = p;
  }
  return {p, rounds};
}

Eigen::VectorXd empirical_receiver_sinr(const ChannelRealization& real,
                                        const Eigen::VectorXd& powers,
                                        const SystemConfig& cfg, int n_symbols,
                                        bool use_optimal, std::uint64_t seed) {
  const Eigen::Index n = real.H.cols();
  const Eigen::Index n_r = real.H.rows();
  if (powers.size() != n) fail(ErrorKind::Structural, "powers length mismatch");
  if (n_symbols < 1) fail(ErrorKind::Structural, "n_symbols must be >= 1");

  const double p_total = powers.sum();
  if (p_total <= 0.0) return Eigen::VectorXd::Zero(n);
  const double alpha = cfg.sigma2 / p_total;

  Eigen::VectorXd sqrt_p = powers.array().sqrt();
  Eigen::MatrixXcd gram = real.H_hat.adjoint() * real.H_hat;
  Eigen::MatrixXcd regularized;
  Eigen::MatrixXcd rhs;  // n x N_r
  if (use_optimal) {
    // (P H_hat^H H_hat P + alpha I)^{-1} P H_hat^H
    Eigen::MatrixXcd pg = sqrt_p.asDiagonal().toDenseMatrix().cast<std::complex<double>>();
    regularized = pg * gram * pg;
    rhs = pg * real.H_hat.adjoint();
  } else {
    regularized = gram;
    rhs = real.H_hat.adjoint();
  }
  regularized.diagonal().array() += alpha;
  Eigen::LDLT<Eigen::MatrixXcd> solver(regularized);
  if (solver.info() != Eigen::Success)
    fail(ErrorKind::DegenerateChannel, "singular receiver filter matrix");
  Eigen::MatrixXcd w = solver.solve(rhs);  // n x N_r

  // Effective mixing matrix seen by the filter outputs.
  Eigen::MatrixXcd g = w * (real.H * sqrt_p.asDiagonal());

  // the symbol/noise stream depends only on the seed, so the two filter
  // variants can be compared on identical draws
  GaussianSampler rng(mix_seed(seed, 0x73696e72ULL, 2));
  const double noise_scale = std::sqrt(cfg.sigma2);
  const double inv_sqrt2 = 0.70710678118654752440;

  Eigen::VectorXd desired = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd residual = Eigen::VectorXd::Zero(n);
  Eigen::VectorXcd x(n), noise(n_r);
  for (int t = 0; t < n_symbols; ++t) {
    for (Eigen::Index l = 0; l < n; ++l) {
      // QPSK corners drawn from two engine bits
      std::uint64_t bits = rng.engine()();
      double re = (bits & 1) ? inv_sqrt2 : -inv_sqrt2;
      double im = (bits & 2) ? inv_sqrt2 : -inv_sqrt2;
      x[l] = std::complex<double>(re, im);
    }
    for (Eigen::Index k = 0; k < n_r; ++k)
      noise[k] = noise_scale * rng.complex_normal();
    Eigen::VectorXcd z = g * x + w * noise;
    for (Eigen::Index l = 0; l < n; ++l) {
      std::complex<double> d = g(l, l) * x[l];
      desired[l] += std::norm(d);
      residual[l] += std::norm(z[l] - d);
    }
  }

  Eigen::VectorXd sinr(n);
  for (Eigen::Index l = 0; l < n; ++l)
    sinr[l] = residual[l] > 0.0 ? desired[l] / residual[l] : 0.0;
  return sinr;
}

}  // namespace greenmimo
