#pragma once

#include <Eigen/Dense>
#include <vector>

#include "greenmimo/channel.hpp"
#include "greenmimo/config.hpp"
#include "greenmimo/spectral.hpp"

namespace greenmimo {

/// Best-antenna selection for every user plus the K-stream spectral summary.
/// Selection runs on the estimated CSI (the receiver has nothing else);
/// the effective channel collects the corresponding true-channel columns.
struct SimoSelection {
  std::vector<int> antenna_index;       ///< selected antenna per user, 0-based
  Eigen::VectorXd gain;                 ///< selected squared column norm of H_hat
  Eigen::MatrixXcd effective_channel;   ///< N_r x K true-channel columns
  SpectralSummary spectral;             ///< over the selected estimated columns
};

/// j* = argmax_j ||h_j||^2 per user block of H_hat, ties to the lowest index.
SimoSelection select_antennas(const ChannelRealization& real,
                              const SystemConfig& cfg);

/// Transmission power of one user at constellation 2^b_total and SER p_e,
/// mirroring the per-stream closed form at stream count K. Requires K >= 2.
double simo_user_power(int b_total, double p_e, double P_total,
                       const SimoSelection& sel, const SystemConfig& cfg);

/// Total MU-SIMO power: per-user transmit powers from the K-stream fixed
/// point plus one circuit term per user.
struct SimoPower {
  Eigen::VectorXd per_user;  ///< transmit watts per user
  double transmit = 0.0;     ///< sum of per_user
  double circuit = 0.0;      ///< K * P_0
  double total() const { return transmit + circuit; }
};
SimoPower total_simo_power(const SystemConfig& cfg, const SimoSelection& sel,
                           const std::vector<double>& per_user_ser);

}  // namespace greenmimo
