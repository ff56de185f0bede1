#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "greenmimo/channel.hpp"
#include "greenmimo/config.hpp"
#include "greenmimo/spectral.hpp"

namespace greenmimo {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestOptions {
  std::uint64_t seed = 20240901;
  std::int64_t haar_samples = 1000000;
  int fixed_point_instances = 200;
  int bruteforce_instances = 20;
  std::int64_t queue_packets = 1000000;
  int norm_realizations = 200;
  bool inject_f3_sign_fault = false;  ///< deliberate fault for testing the check
};

/// A random well-conditioned instance on which the power model is feasible:
/// K in {2,3,4}, N_t = 2, N_r comfortably above the stream count.
struct RandomInstance {
  SystemConfig cfg;
  ChannelRealization real;
  SpectralSummary spec;
};
RandomInstance random_feasible_instance(std::mt19937_64& engine);

/// Oracle suite: Haar fourth-moment, total-power fixed point, exhaustive
/// constellation search, discrete-event queue comparison and the
/// Frobenius-vs-selected-column inequality.
std::vector<CheckResult> run_selftest(const SelftestOptions& opts);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace greenmimo
