#include "greenmimo/switching.hpp"

#include <cmath>
#include <limits>

#include "greenmimo/errors.hpp"
#include "greenmimo/mmse.hpp"
#include "greenmimo/modopt.hpp"
#include "greenmimo/queueing.hpp"
#include "greenmimo/simo.hpp"
#include "greenmimo/spectral.hpp"

namespace greenmimo {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

bool is_feasibility_error(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Infeasible:
    case ErrorKind::InfeasiblePower:
    case ErrorKind::InfeasibleSer:
    case ErrorKind::Instability:
      return true;
    default:
      return false;
  }
}

// Throughput and per-class delays are shared by both modes: each user ships
// b_total bits per channel use either way, and the packet keeps the same
// symbol count, so the comparison runs at matched throughput.
void fill_traffic(PowerReport& rep, const SystemConfig& cfg) {
  const int heavy = cfg.heavy_user_count();
  const double l = static_cast<double>(cfg.L);
  const double lh = static_cast<double>(cfg.L_h);
  double total_throughput = 0.0;
  rep.delay_sensitive = kNan;
  rep.delay_tolerant = kNan;
  if (heavy > 0) {
    const double p_s = packet_success(cfg.p_e_sensitive, l, cfg.b_total, cfg.N_t);
    QueueStats q = delay_stats(p_s, cfg.b_total, cfg.R_s, l, lh, cfg.r);
    rep.delay_sensitive = q.mean_delay;
    total_throughput += heavy * q.throughput;
  }
  if (heavy < cfg.K) {
    const double p_s = packet_success(cfg.p_e_tolerant, l, cfg.b_total, cfg.N_t);
    QueueStats q = delay_stats(p_s, cfg.b_total, cfg.R_s, l, lh, cfg.r);
    rep.delay_tolerant = q.mean_delay;
    total_throughput += (cfg.K - heavy) * q.throughput;
  }
  rep.throughput = total_throughput;
  rep.energy_efficiency = rep.throughput / rep.total_power;
}

PowerReport evaluate_mimo_with(const ChannelRealization& real,
                               const SystemConfig& cfg, bool optimize) {
  PowerReport rep;
  rep.mode = Mode::Mimo;
  rep.rho = cfg.rho;
  rep.circuit_power = cfg.K * cfg.N_t * cfg.P_0;
  const std::vector<double> ser = cfg.per_user_ser();
  try {
    SpectralSummary spec =
        spectral_functions(real.eigenvalues, cfg.alpha(), cfg.tau);
    ModulationAllocation alloc;
    if (optimize) {
      auto [b_star, trace] = dinkelbach(spec, cfg, ser);
      auto power_of = [&](const ModulationAllocation& a) {
        return objective_parts(a, spec, cfg, ser).first /
               objective_parts(a, spec, cfg, ser).second;
      };
      alloc = round_allocation(b_star, power_of);
    } else {
      alloc = equal_rate_baseline(cfg);
    }
    StreamPowerResult p = total_mimo_power(alloc, spec, cfg, ser);
    rep.transmit_power = p.P_total;
    rep.total_power = rep.transmit_power + rep.circuit_power;
    fill_traffic(rep, cfg);
    rep.feasible = true;
  } catch (const Error& e) {
    if (!is_feasibility_error(e)) throw;
    rep.feasible = false;
    rep.infeasible_reason = e.what();
  }
  return rep;
}

}  // namespace

PowerReport evaluate_mode(Mode mode, const ChannelRealization& real,
                          const SystemConfig& cfg) {
  if (mode == Mode::Mimo) return evaluate_mimo_with(real, cfg, true);

  PowerReport rep;
  rep.mode = Mode::Simo;
  rep.rho = cfg.rho;
  rep.circuit_power = cfg.K * cfg.P_0;
  try {
    SimoSelection sel = select_antennas(real, cfg);
    SimoPower p = total_simo_power(cfg, sel, cfg.per_user_ser());
    rep.transmit_power = p.transmit;
    rep.total_power = rep.transmit_power + rep.circuit_power;
    fill_traffic(rep, cfg);
    rep.feasible = true;
  } catch (const Error& e) {
    if (!is_feasibility_error(e)) throw;
    rep.feasible = false;
    rep.infeasible_reason = e.what();
  }
  return rep;
}

PowerReport evaluate_mimo_equal_rate(const ChannelRealization& real,
                                     const SystemConfig& cfg) {
  return evaluate_mimo_with(real, cfg, false);
}

Mode select_mode(const PowerReport& report_m, const PowerReport& report_s) {
  if (!report_m.feasible && !report_s.feasible)
    fail(ErrorKind::Infeasible, "both transmission modes are infeasible");
  if (!report_s.feasible) return Mode::Mimo;
  if (!report_m.feasible) return Mode::Simo;
  return report_m.total_power <= report_s.total_power ? Mode::Mimo : Mode::Simo;
}

namespace {

// Class-weighted total powers at a fractional heavy-user count; used to
// evaluate the crossover equation between achievable grid points.
struct WeightedTotals {
  double mimo = 0.0;
  double simo = 0.0;
  bool feasible = false;
};

WeightedTotals weighted_totals(const ChannelRealization& real,
                               const SystemConfig& cfg, double heavy_users) {
  WeightedTotals out;
  std::vector<SerClass> classes = {{heavy_users, cfg.p_e_sensitive},
                                   {cfg.K - heavy_users, cfg.p_e_tolerant}};
  try {
    SpectralSummary spec =
        spectral_functions(real.eigenvalues, cfg.alpha(), cfg.tau);
    auto [rows, trace] = dinkelbach_by_class(classes, spec, cfg);
    ClassRows rounded = round_class_rows(rows, classes, spec, cfg);
    out.mimo = total_power_by_class(rounded, classes, spec, cfg) +
               cfg.K * cfg.N_t * cfg.P_0;

    SimoSelection sel = select_antennas(real, cfg);
    std::vector<std::pair<double, double>> weighted;
    for (const auto& c : classes)
      weighted.emplace_back(c.users, eta(cfg.b_total, c.ser, cfg.R_s, cfg.B));
    out.simo = total_power_fixed_point(weighted, sel.spectral, cfg.sigma2) +
               cfg.K * cfg.P_0;
    out.feasible = true;
  } catch (const Error& e) {
    if (!is_feasibility_error(e)) throw;
  }
  return out;
}

}  // namespace

CrossoverResult crossover_rho(const SystemConfig& cfg,
                              const std::vector<ChannelRealization>& realizations) {
  if (realizations.empty())
    fail(ErrorKind::Structural, "crossover needs at least one realization");

  CrossoverResult res;
  const int k = cfg.K;
  for (int h = 0; h <= k; ++h) {
    SystemConfig point = cfg;
    point.rho = static_cast<double>(h) / k;
    double sum_m = 0.0, sum_s = 0.0;
    int feasible = 0;
    for (const auto& real : realizations) {
      PowerReport m = evaluate_mode(Mode::Mimo, real, point);
      PowerReport s = evaluate_mode(Mode::Simo, real, point);
      if (m.feasible && s.feasible) {
        sum_m += m.total_power;
        sum_s += s.total_power;
        ++feasible;
      }
    }
    res.rho_grid.push_back(point.rho);
    res.feasible_trials.push_back(feasible);
    res.mean_mimo_total.push_back(feasible > 0 ? sum_m / feasible : kNan);
    res.mean_simo_total.push_back(feasible > 0 ? sum_s / feasible : kNan);
  }

  // scan consecutive included points for a sign change of P_m - P_s
  int prev = -1;
  for (int idx = 0; idx <= k; ++idx) {
    if (res.feasible_trials[std::size_t(idx)] == 0) continue;
    if (prev >= 0) {
      const double d0 = res.mean_mimo_total[std::size_t(prev)] -
                        res.mean_simo_total[std::size_t(prev)];
      const double d1 = res.mean_mimo_total[std::size_t(idx)] -
                        res.mean_simo_total[std::size_t(idx)];
      if ((d0 <= 0.0 && d1 > 0.0) || (d0 >= 0.0 && d1 < 0.0)) {
        const double r0 = res.rho_grid[std::size_t(prev)];
        const double r1 = res.rho_grid[std::size_t(idx)];
        res.found = true;
        res.rho_star = r0 + (r1 - r0) * (0.0 - d0) / (d1 - d0);

        // evaluate the crossover equation at the fractional point
        double sum_m = 0.0, sum_s = 0.0;
        int n = 0;
        for (const auto& real : realizations) {
          WeightedTotals wt = weighted_totals(real, cfg, res.rho_star * k);
          if (wt.feasible) {
            sum_m += wt.mimo;
            sum_s += wt.simo;
            ++n;
          }
        }
        if (n > 0) {
          const double pm = sum_m / n, ps = sum_s / n;
          res.residual = std::abs(pm - ps);
          res.residual_relative = res.residual / (0.5 * (pm + ps));
        }
        return res;
      }
    }
    prev = idx;
  }

  // no sign change: report the uniformly cheaper mode
  double last_d = 0.0;
  for (int idx = 0; idx <= k; ++idx)
    if (res.feasible_trials[std::size_t(idx)] > 0)
      last_d = res.mean_mimo_total[std::size_t(idx)] -
               res.mean_simo_total[std::size_t(idx)];
  res.found = false;
  res.cheaper = last_d <= 0.0 ? Mode::Mimo : Mode::Simo;
  return res;
}

}  // namespace greenmimo
