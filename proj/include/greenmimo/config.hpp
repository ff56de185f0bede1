#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace greenmimo {

/// All scalar system parameters.
///
/// Defaults follow the usual textbook uplink setup: ten two-antenna users, a
/// four-antenna base station, 1080-bit packets with a 32-bit header, symbol
/// rate 100 kHz with Nyquist bandwidth, SER classes 1e-2 (delay tolerant) and
/// 1e-4 (delay sensitive). b_total, b_min, sigma2, P_0 and P_ref have no
/// canonical values; the defaults here are simulator choices and every field
/// can be overridden from a config file.
struct SystemConfig {
  int K = 10;     ///< user count
  int N_t = 2;    ///< transmit antennas per user
  int N_r = 4;    ///< receive antennas at the base station
  double sigma2 = 1.0;  ///< noise power (W)
  double tau = 0.1;     ///< CSI quality in [0,1]; 0 = perfect
  double R_s = 1e5;     ///< symbol rate (symbols/s)
  double B = 1e5;       ///< bandwidth (Hz)
  std::int64_t L = 1080;   ///< packet size (bits)
  std::int64_t L_h = 32;   ///< header size (bits)
  double r = 1.0;          ///< packet arrival rate (packets/time-unit)
  double P_0 = 0.1;        ///< circuit power per active antenna (W)
  int b_total = 12;        ///< information bits per channel use per user
  int b_min = 2;           ///< minimum constellation exponent
  double p_e_sensitive = 1e-4;  ///< SER target for delay-sensitive users
  double p_e_tolerant = 1e-2;   ///< SER target for delay-tolerant users
  double rho = 0.5;             ///< fraction of delay-sensitive users
  double P_ref = 10.0;          ///< reference power for the regularizer
  std::int64_t Q_0 = 64;  ///< buffer size; accepted but unused by analytics

  int stream_count() const { return N_t * K; }

  /// Number of delay-sensitive users, rho*K rounded to the nearest integer.
  int heavy_user_count() const;

  /// Per-user SER targets: the first heavy_user_count() users are sensitive.
  std::vector<double> per_user_ser() const;

  /// Regularizer alpha = sigma2 / P_ref.
  double alpha() const { return sigma2 / P_ref; }

  /// Throws Error{Parse} when any invariant is violated.
  void validate() const;
};

/// Parses key=value lines ('#' starts a comment). Unknown keys, malformed
/// lines and out-of-range values raise Error{Parse} naming line and key.
/// Omitted keys keep their defaults.
SystemConfig parse_config(const std::string& text);

/// Canonical key=value serialization; parse_config round-trips it exactly.
std::string serialize_config(const SystemConfig& cfg);

}  // namespace greenmimo
