#include "greenmimo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "greenmimo/channel.hpp"
#include "greenmimo/errors.hpp"
#include "greenmimo/mmse.hpp"
#include "greenmimo/rng.hpp"
#include "greenmimo/switching.hpp"

namespace greenmimo {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

class Accumulator {
 public:
  void add(double v) {
    sum_ += v;
    sum_sq_ += v * v;
    ++n_;
  }
  std::int64_t count() const { return n_; }
  double mean() const { return n_ > 0 ? sum_ / n_ : kNan; }
  double se() const {
    if (n_ <= 1) return 0.0;
    const double m = mean();
    double var = (sum_sq_ - n_ * m * m) / (n_ - 1);
    if (var < 0.0) var = 0.0;  // rounding guard
    return std::sqrt(var / n_);
  }

 private:
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
  std::int64_t n_ = 0;
};

void push_column(CurveTable& table, const SweepSpec& spec, const std::string& name,
                 const std::vector<Accumulator>& acc) {
  if (!spec.outputs.empty() &&
      std::find(spec.outputs.begin(), spec.outputs.end(), name) == spec.outputs.end())
    return;
  CurveColumn col;
  col.name = name;
  for (const auto& a : acc) {
    col.mean.push_back(a.mean());
    col.se.push_back(a.count() > 0 ? a.se() : kNan);
    col.count.push_back(a.count());
  }
  table.columns.push_back(std::move(col));
}

}  // namespace

CurveTable run_sweep(const SweepSpec& spec, const SystemConfig& cfg) {
  if (spec.grid.empty()) fail(ErrorKind::Structural, "empty sweep grid");
  if (spec.trials < 1) fail(ErrorKind::Structural, "trials must be >= 1");
  for (std::size_t i = 1; i < spec.grid.size(); ++i)
    if (!(spec.grid[i] > spec.grid[i - 1]))
      fail(ErrorKind::Structural, "sweep grid must be strictly increasing");

  const std::size_t g = spec.grid.size();
  const bool equal_rate_defined = cfg.b_total % cfg.N_t == 0;

  std::vector<Accumulator> mimo_opt(g), mimo_equal(g), mimo_total(g),
      simo_transmit(g), simo_total(g), ee_mimo(g), ee_simo(g), thr(g),
      selected(g), delay_s(g), delay_t(g);
  std::vector<std::string> first_reason(g);

  for (std::size_t gi = 0; gi < g; ++gi) {
    SystemConfig point = cfg;
    if (spec.variable == SweepVariable::Tau)
      point.tau = spec.grid[gi];
    else
      point.rho = spec.grid[gi];
    point.validate();

    for (int t = 0; t < spec.trials; ++t) {
      const std::uint64_t trial_seed =
          mix_seed(spec.seed, static_cast<std::uint64_t>(gi),
                   static_cast<std::uint64_t>(t));
      ChannelRealization real = sample_channel(point, trial_seed);

      PowerReport m = evaluate_mode(Mode::Mimo, real, point);
      PowerReport s = evaluate_mode(Mode::Simo, real, point);

      if (m.feasible) {
        mimo_opt[gi].add(m.transmit_power);
        mimo_total[gi].add(m.total_power);
        ee_mimo[gi].add(m.energy_efficiency);
      } else if (first_reason[gi].empty()) {
        first_reason[gi] = "mimo: " + m.infeasible_reason;
      }
      if (s.feasible) {
        simo_transmit[gi].add(s.transmit_power);
        simo_total[gi].add(s.total_power);
        ee_simo[gi].add(s.energy_efficiency);
      } else if (first_reason[gi].empty()) {
        first_reason[gi] = "simo: " + s.infeasible_reason;
      }
      if (m.feasible || s.feasible) {
        const PowerReport& any = m.feasible ? m : s;
        thr[gi].add(any.throughput);
        if (!std::isnan(any.delay_sensitive)) delay_s[gi].add(any.delay_sensitive);
        if (!std::isnan(any.delay_tolerant)) delay_t[gi].add(any.delay_tolerant);
      }
      if (m.feasible && s.feasible)
        selected[gi].add(select_mode(m, s) == Mode::Mimo ? 1.0 : 0.0);

      if (equal_rate_defined) {
        PowerReport eq = evaluate_mimo_equal_rate(real, point);
        if (eq.feasible) mimo_equal[gi].add(eq.transmit_power);
      }
    }
  }

  CurveTable table;
  table.x_name = spec.variable == SweepVariable::Tau ? "tau" : "rho";
  table.x = spec.grid;
  table.config = cfg;
  table.seed = spec.seed;
  table.trials = spec.trials;
  table.command = table.x_name == "tau" ? "sweep-tau" : "sweep-rho";

  push_column(table, spec, "mimo_transmit_opt", mimo_opt);
  push_column(table, spec, "mimo_transmit_equal", mimo_equal);
  push_column(table, spec, "mimo_total", mimo_total);
  push_column(table, spec, "simo_transmit", simo_transmit);
  push_column(table, spec, "simo_total", simo_total);
  push_column(table, spec, "ee_mimo", ee_mimo);
  push_column(table, spec, "ee_simo", ee_simo);
  push_column(table, spec, "throughput", thr);
  push_column(table, spec, "mimo_selected_frac", selected);
  push_column(table, spec, "delay_sensitive", delay_s);
  push_column(table, spec, "delay_tolerant", delay_t);

  for (std::size_t gi = 0; gi < g; ++gi) {
    const bool missing = mimo_opt[gi].count() == 0 && simo_transmit[gi].count() == 0;
    if (missing)
      table.notes.push_back("all trials infeasible; " + first_reason[gi]);
    else if (mimo_opt[gi].count() < spec.trials || simo_transmit[gi].count() < spec.trials)
      table.notes.push_back(
          "feasible trials mimo=" + std::to_string(mimo_opt[gi].count()) +
          " simo=" + std::to_string(simo_transmit[gi].count()) + "; " +
          first_reason[gi]);
    else
      table.notes.push_back("");
  }
  return table;
}

CurveTable fig2_experiment(const SystemConfig& cfg, int trials,
                           const std::vector<double>& power_grid,
                           std::uint64_t seed, int n_symbols) {
  if (trials < 1) fail(ErrorKind::Structural, "trials must be >= 1");
  if (power_grid.empty()) fail(ErrorKind::Structural, "empty power grid");
  if (n_symbols < 1000)
    fail(ErrorKind::Structural, "empirical SINR estimation needs >= 1000 symbols");

  const std::size_t g = power_grid.size();
  const int n = cfg.stream_count();
  std::vector<Accumulator> simplified(g), mmse(g);

  for (std::size_t gi = 0; gi < g; ++gi) {
    const double p_total = power_grid[gi];
    const Eigen::VectorXd powers = Eigen::VectorXd::Constant(n, p_total / n);
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t trial_seed =
          mix_seed(seed, static_cast<std::uint64_t>(gi), static_cast<std::uint64_t>(t));
      ChannelRealization real = sample_channel(cfg, trial_seed);
      Eigen::VectorXd s0 =
          empirical_receiver_sinr(real, powers, cfg, n_symbols, false, trial_seed);
      Eigen::VectorXd s1 =
          empirical_receiver_sinr(real, powers, cfg, n_symbols, true, trial_seed);
      simplified[gi].add(s0[0]);
      mmse[gi].add(s1[0]);
    }
  }

  CurveTable table;
  table.x_name = "P";
  table.x = power_grid;
  table.config = cfg;
  table.seed = seed;
  table.trials = trials;
  table.command = "fig2";
  SweepSpec no_filter;
  push_column(table, no_filter, "sinr_simplified", simplified);
  push_column(table, no_filter, "sinr_mmse", mmse);
  table.notes.assign(g, "");
  return table;
}

}  // namespace greenmimo
