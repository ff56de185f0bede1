#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "greenmimo/config.hpp"

namespace greenmimo {

enum class SweepVariable { Tau, Rho };

/// Sweep description. Per-trial seeds derive deterministically from
/// (seed, grid index, trial index), so results are independent of execution
/// order. An empty outputs list keeps every metric column.
struct SweepSpec {
  SweepVariable variable = SweepVariable::Tau;
  std::vector<double> grid;
  int trials = 1000;
  std::uint64_t seed = 1;
  std::vector<std::string> outputs;  ///< optional column filter
};

struct CurveColumn {
  std::string name;
  std::vector<double> mean;       ///< NaN marks a missing point
  std::vector<double> se;
  std::vector<std::int64_t> count;  ///< trials contributing to the mean
};

/// One curve table: grid values, per-metric mean/standard-error columns and
/// a note per grid point (empty when all went well).
struct CurveTable {
  std::string x_name;
  std::vector<double> x;
  std::vector<CurveColumn> columns;
  std::vector<std::string> notes;
  SystemConfig config;
  std::uint64_t seed = 0;
  int trials = 0;
  std::string command;
};

/// Runs the full pipeline (channel -> constellation optimization -> power ->
/// queueing -> mode switching) per grid point and trial. Metric columns:
/// mimo_transmit_opt, mimo_transmit_equal, mimo_total, simo_transmit,
/// simo_total, ee_mimo, ee_simo, throughput, mimo_selected_frac,
/// delay_sensitive, delay_tolerant. Infeasible trials are excluded from the
/// affected means and counted; a grid point with no feasible trial is
/// recorded as missing with a reason.
CurveTable run_sweep(const SweepSpec& spec, const SystemConfig& cfg);

/// Mean empirical SINR of stream (1,1) under the simplified and the
/// power-aware receive filters, per total-power grid point, with equal
/// per-stream powers. Columns: sinr_simplified, sinr_mmse.
CurveTable fig2_experiment(const SystemConfig& cfg, int trials,
                           const std::vector<double>& power_grid,
                           std::uint64_t seed, int n_symbols = 2000);

}  // namespace greenmimo
