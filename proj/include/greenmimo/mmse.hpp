#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "greenmimo/channel.hpp"
#include "greenmimo/config.hpp"
#include "greenmimo/spectral.hpp"

namespace greenmimo {

/// Per-user per-stream constellation exponents. Real-valued during
/// optimization, integer-valued after rounding; row i = user i.
struct ModulationAllocation {
  Eigen::MatrixXd b;  ///< K x N_t
  int b_total = 0;
  int b_min = 1;

  bool is_integral() const;
  /// Throws Error{Structural} when row sums or the floor are violated.
  void validate() const;
};

/// Per-stream transmit powers and their total.
struct StreamPowerResult {
  Eigen::MatrixXd p;  ///< K x N_t, watts
  double P_total = 0.0;
};

/// Deterministic per-stream SINR of the simplified MMSE receiver:
///
///            p_ij (1-tau^2)(f1+f2)
///   --------------------------------------------------------------
///   (P-p_ij)(1-tau^2)(f2-n f1)/(1-n) + n(n+1) p_ij tau^2 f3 + n(n+1) sigma2 f3
double sinr_per_stream(double p_ij, double P_total, const SpectralSummary& spec,
                       double sigma2);

/// Closed-form per-stream power delivering SINR eta_val at total power P:
///   p = eta (c3 P + f3 n(n+1) sigma2) / (c1 + eta c2).
/// Inverse of sinr_per_stream at fixed P. Throws Error{InfeasiblePower} when
/// the denominator is nonpositive (e.g. tau = 1).
double stream_power(double eta_val, double P_total, const SpectralSummary& spec,
                    double sigma2);

/// Self-consistent total power over weighted stream groups (weight, eta):
///   P = [sum w sigma_hat^2 f3 / (c2 + c1/eta)] / (1 - c3 sum w / (c2 + c1/eta)).
/// Fractional weights support class-averaged evaluation. Throws
/// Error{InfeasiblePower} per stream group and Error{Infeasible} when the
/// denominator 1 - c3*sum is nonpositive.
double total_power_fixed_point(
    const std::vector<std::pair<double, double>>& weighted_etas,
    const SpectralSummary& spec, double sigma2);

/// Total MU-MIMO transmit power for an allocation plus the per-stream split.
/// per_user_ser[i] is user i's SER target. The returned powers satisfy
/// sum p_ij = P_total.
StreamPowerResult total_mimo_power(const ModulationAllocation& alloc,
                                   const SpectralSummary& spec,
                                   const SystemConfig& cfg,
                                   const std::vector<double>& per_user_ser);

/// Iterates P -> alpha = sigma2/P -> P until |dP|/P < 1e-6 (at most 50
/// rounds), starting from alpha = sigma2/P_ref. Returns (P, rounds).
/// Breaks the circular definition of the regularizer deterministically.
std::pair<double, int> refine_alpha_fixed_point(
    const Eigen::Ref<const Eigen::VectorXd>& lambda, double tau, double sigma2,
    double P_ref, const std::vector<std::pair<double, double>>& weighted_etas);

/// Genie-aided empirical per-stream SINR through the simulated receiver.
/// use_optimal selects the power-aware filter; otherwise the simplified one.
/// Both use regularizer sigma2 / sum(powers).
Eigen::VectorXd empirical_receiver_sinr(const ChannelRealization& real,
                                        const Eigen::VectorXd& powers,
                                        const SystemConfig& cfg, int n_symbols,
                                        bool use_optimal, std::uint64_t seed);

}  // namespace greenmimo
