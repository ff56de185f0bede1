#include "greenmimo/simo.hpp"

#include <string>

#include "greenmimo/errors.hpp"
#include "greenmimo/mmse.hpp"

namespace greenmimo {

SimoSelection select_antennas(const ChannelRealization& real,
                              const SystemConfig& cfg) {
  SimoSelection sel;
  sel.antenna_index.resize(static_cast<std::size_t>(cfg.K));
  sel.gain.resize(cfg.K);
  sel.effective_channel.resize(cfg.N_r, cfg.K);

  Eigen::MatrixXcd selected_hat(cfg.N_r, cfg.K);
  for (int i = 0; i < cfg.K; ++i) {
    const Eigen::Index offset = static_cast<Eigen::Index>(i) * cfg.N_t;
    int j_star = 0;
    sel.gain[i] = max_column_norm_sq(real.H_hat.middleCols(offset, cfg.N_t), &j_star);
    sel.antenna_index[static_cast<std::size_t>(i)] = j_star;
    selected_hat.col(i) = real.H_hat.col(offset + j_star);
    sel.effective_channel.col(i) = real.H.col(offset + j_star);
  }

  // the K-stream summary needs K >= 2; the power operations reject K = 1
  if (cfg.K >= 2) {
    Eigen::MatrixXcd gram = selected_hat.adjoint() * selected_hat;
    gram = 0.5 * (gram + gram.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
    Eigen::VectorXd lambda = eig.eigenvalues();
    const double floor = 1e-12 * std::max(lambda.maxCoeff(), 0.0);
    for (Eigen::Index l = 0; l < lambda.size(); ++l)
      if (lambda[l] < floor) lambda[l] = 0.0;
    sel.spectral = spectral_functions(lambda, cfg.alpha(), cfg.tau);
  }
  return sel;
}

double simo_user_power(int b_total, double p_e, double P_total,
                       const SimoSelection& sel, const SystemConfig& cfg) {
  if (cfg.K < 2)
    fail(ErrorKind::SingularConfiguration,
         "the SIMO power model needs K >= 2, got K = " + std::to_string(cfg.K));
  const double eta_val = eta(b_total, p_e, cfg.R_s, cfg.B);
  return stream_power(eta_val, P_total, sel.spectral, cfg.sigma2);
}

SimoPower total_simo_power(const SystemConfig& cfg, const SimoSelection& sel,
                           const std::vector<double>& per_user_ser) {
  if (cfg.K < 2)
    fail(ErrorKind::SingularConfiguration,
         "the SIMO power model needs K >= 2, got K = " + std::to_string(cfg.K));
  if (static_cast<int>(per_user_ser.size()) != cfg.K)
    fail(ErrorKind::Structural, "per_user_ser length must equal K");

  std::vector<std::pair<double, double>> weighted;
  weighted.reserve(per_user_ser.size());
  std::vector<double> etas(per_user_ser.size());
  for (std::size_t i = 0; i < per_user_ser.size(); ++i) {
    etas[i] = eta(cfg.b_total, per_user_ser[i], cfg.R_s, cfg.B);
    weighted.emplace_back(1.0, etas[i]);
  }

  SimoPower p;
  const double total = total_power_fixed_point(weighted, sel.spectral, cfg.sigma2);
  p.per_user.resize(cfg.K);
  for (int i = 0; i < cfg.K; ++i)
    p.per_user[i] = stream_power(etas[static_cast<std::size_t>(i)], total,
                                 sel.spectral, cfg.sigma2);
  p.transmit = p.per_user.sum();
  p.circuit = cfg.K * cfg.P_0;
  return p;
}

}  // namespace greenmimo
