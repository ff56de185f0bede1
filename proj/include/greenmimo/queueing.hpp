#pragma once

#include <cstdint>
#include <vector>

namespace greenmimo {

/// M/G/1 statistics of a user's packet queue under geometric retransmission.
struct QueueStats {
  double p_s = 0.0;            ///< packet success probability
  double t_p = 0.0;            ///< per-packet transmission time (s)
  double mean_service = 0.0;   ///< E{S_T} = t_p / p_s
  double second_moment = 0.0;  ///< E{S_T^2} = 2 t_p^2/p_s^2 - t_p^2/p_s
  double mu = 0.0;             ///< service rate (packets/s)
  double intensity = 0.0;      ///< traffic intensity r/mu
  double mean_queue = 0.0;     ///< E{Q_q} (packets)
  double mean_delay = 0.0;     ///< E{D} (s)
  double throughput = 0.0;     ///< goodput (bits/s)
};

/// p_s = (1 - p_e)^(n_streams * L / b_total): every symbol of the packet must
/// be received correctly.
double packet_success(double p_e, double L, double b_total, int n_streams);

/// T = ((L - L_h)/L) * b_total * R_s * p_s, payload bits correctly received
/// per second.
double throughput(double p_s, double b_total, double R_s, double L, double L_h);

/// Full queue statistics via the Pollaczek-Khintchine formula. Requires
/// r < mu = b_total*R_s*p_s/L; otherwise raises Error{Instability}.
QueueStats delay_stats(double p_s, double b_total, double R_s, double L,
                       double L_h, double r);

/// Mean delay in closed form:
///   E{D} = (2 b R_s L - r L^2) / (2 b^2 R_s^2 p_s - 2 r b R_s L).
double mean_delay_closed_form(double p_s, double b_total, double R_s, double L,
                              double r);

/// Discrete-event M/G/1 run: Poisson arrivals at rate r, service equal to
/// t_p times a geometric attempt count with success p_s per attempt.
struct Mg1Result {
  double mean_delay = 0.0;               ///< average sojourn time (s)
  std::vector<std::int64_t> attempt_histogram;  ///< attempt counts, index 0 = 1 attempt
  std::int64_t packets = 0;
};
Mg1Result simulate_mg1(double r, double p_s, double t_p, std::int64_t n_packets,
                       std::uint64_t seed);

/// Upper-tail probability Q(chi2; dof) of the chi-square distribution,
/// via the regularized incomplete gamma function.
double chi_square_pvalue(double chi2, int dof);

/// Goodness-of-fit p-value of an attempt histogram against the geometric
/// law P{n attempts} = p_s (1-p_s)^{n-1}; tail bins merged so every expected
/// count is at least 5.
double geometric_fit_pvalue(const std::vector<std::int64_t>& attempt_histogram,
                            double p_s);

}  // namespace greenmimo
