#pragma once

#include <string>
#include <vector>

#include "greenmimo/channel.hpp"
#include "greenmimo/config.hpp"

namespace greenmimo {

enum class Mode { Mimo, Simo };

/// Full evaluation of one transmission mode on one channel realization.
/// total_power = transmit_power + circuit_power and
/// energy_efficiency = throughput / total_power whenever feasible.
/// Delay fields are NaN for an empty user class.
struct PowerReport {
  Mode mode = Mode::Mimo;
  bool feasible = false;
  std::string infeasible_reason;
  double transmit_power = 0.0;
  double circuit_power = 0.0;
  double total_power = 0.0;
  double throughput = 0.0;
  double energy_efficiency = 0.0;
  double delay_sensitive = 0.0;
  double delay_tolerant = 0.0;
  double rho = 0.0;
};

/// Runs the mode's power pipeline on one realization. The first
/// round(rho*K) users carry p_e_sensitive, the rest p_e_tolerant. The MIMO
/// path optimizes and rounds the constellation allocation; the SIMO path
/// puts b_total on the selected antenna per user. Infeasibility is reported
/// in the result, not thrown, so the other mode can still be evaluated.
PowerReport evaluate_mode(Mode mode, const ChannelRealization& real,
                          const SystemConfig& cfg);

/// Equal-rate variant of the MIMO evaluation (no optimization); requires
/// b_total divisible by N_t.
PowerReport evaluate_mimo_equal_rate(const ChannelRealization& real,
                                     const SystemConfig& cfg);

/// argmin of total power; ties go to MIMO. Throws Error{Infeasible} when
/// both reports are infeasible.
Mode select_mode(const PowerReport& report_m, const PowerReport& report_s);

/// Result of the crossover search over the heavy-user ratio.
struct CrossoverResult {
  bool found = false;
  double rho_star = 0.0;       ///< interpolated crossover ratio when found
  double residual = 0.0;       ///< |P_m - P_s| at rho_star, class-weighted eval
  double residual_relative = 0.0;  ///< residual / mean total power at rho_star
  Mode cheaper = Mode::Mimo;   ///< uniformly cheaper mode when !found
  std::vector<double> rho_grid;
  std::vector<double> mean_mimo_total;  ///< NaN at excluded points
  std::vector<double> mean_simo_total;
  std::vector<int> feasible_trials;     ///< per grid point
};

/// Locates the ratio where the realization-averaged total powers of the two
/// modes cross, scanning rho in {0, 1/K, ..., 1} and refining by linear
/// interpolation. Grid points with no feasible trial are excluded. The
/// residual re-evaluates both totals at the fractional rho_star via
/// class-weighted power sums.
CrossoverResult crossover_rho(const SystemConfig& cfg,
                              const std::vector<ChannelRealization>& realizations);

}  // namespace greenmimo
