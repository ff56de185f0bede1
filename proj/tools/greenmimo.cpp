// Command-line front end: config parsing, experiment selection, CSV output.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "greenmimo/channel.hpp"
#include "greenmimo/csv.hpp"
#include "greenmimo/errors.hpp"
#include "greenmimo/harness.hpp"
#include "greenmimo/selftest.hpp"
#include "greenmimo/rng.hpp"
#include "greenmimo/switching.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitSelftest = 3;

std::vector<double> parse_grid(const std::string& text) {
  // "a:b:step", inclusive of b up to half a step of rounding slack
  double a = 0, b = 0, step = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3 || step <= 0)
    greenmimo::fail(greenmimo::ErrorKind::Parse,
                    "grid must be 'a:b:step' with step > 0, got '" + text + "'");
  std::vector<double> grid;
  for (int k = 0;; ++k) {
    double v = a + k * step;
    if (v > b + 0.5 * step) break;
    grid.push_back(std::min(v, b));
  }
  if (grid.empty())
    greenmimo::fail(greenmimo::ErrorKind::Parse, "grid '" + text + "' is empty");
  return grid;
}

greenmimo::SystemConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in)
    greenmimo::fail(greenmimo::ErrorKind::Parse,
                    "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return greenmimo::parse_config(ss.str());
}

bool all_points_missing(const greenmimo::CurveTable& table) {
  for (const auto& note : table.notes)
    if (note.rfind("all trials infeasible", 0) != 0) return false;
  return !table.notes.empty();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficient MU-MIMO/SIMO link adaptation simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string grid_text;
  std::uint64_t seed = 1;
  int trials = -1;
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--seed", seed, "base seed (default 1)");
  app.add_option("--trials", trials, "realizations per grid point");
  app.add_option("--out", out_path, "output CSV path");
  app.add_option("--grid", grid_text, "grid override as a:b:step");

  auto* sweep_tau = app.add_subcommand("sweep-tau", "sweep the CSI quality tau");
  auto* sweep_rho = app.add_subcommand("sweep-rho", "sweep the heavy-user ratio rho");
  auto* fig2 = app.add_subcommand(
      "fig2", "empirical SINR of the simplified vs power-aware receiver");
  auto* crossover =
      app.add_subcommand("crossover", "locate the mode-switching ratio rho*");
  auto* selftest = app.add_subcommand("selftest", "run the oracle checks");
  for (auto* sc : {sweep_tau, sweep_rho, fig2, crossover, selftest})
    sc->fallthrough();  // global flags may follow the subcommand
  std::string fault;
  selftest->add_option("--fault", fault,
                       "inject a deliberate defect (f3-sign) to exercise the checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;  // usage errors collapse to 1
  }

  try {
    greenmimo::SystemConfig cfg = load_config(config_path);
    cfg.validate();

    if (selftest->parsed()) {
      greenmimo::SelftestOptions opts;
      opts.seed = seed;
      if (fault == "f3-sign")
        opts.inject_f3_sign_fault = true;
      else if (!fault.empty())
        greenmimo::fail(greenmimo::ErrorKind::Parse, "unknown fault '" + fault + "'");
      auto results = greenmimo::run_selftest(opts);
      for (const auto& r : results)
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": "
                  << r.detail << "\n";
      return greenmimo::all_passed(results) ? kExitOk : kExitSelftest;
    }

    if (sweep_tau->parsed() || sweep_rho->parsed()) {
      greenmimo::SweepSpec spec;
      spec.variable = sweep_tau->parsed() ? greenmimo::SweepVariable::Tau
                                          : greenmimo::SweepVariable::Rho;
      spec.grid = parse_grid(grid_text.empty()
                                 ? (sweep_tau->parsed() ? "0:0.5:0.1" : "0:1:0.1")
                                 : grid_text);
      spec.trials = trials > 0 ? trials : 1000;
      spec.seed = seed;
      greenmimo::CurveTable table = greenmimo::run_sweep(spec, cfg);
      const std::string path =
          out_path.empty() ? table.command + ".csv" : out_path;
      greenmimo::emit_csv(table, path);
      std::cout << "wrote " << path << "\n";
      if (all_points_missing(table)) {
        std::cerr << "every grid point was infeasible; see the note column\n";
        return kExitInfeasible;
      }
      return kExitOk;
    }

    if (fig2->parsed()) {
      std::vector<double> grid = parse_grid(grid_text.empty() ? "2:16:2" : grid_text);
      greenmimo::CurveTable table = greenmimo::fig2_experiment(
          cfg, trials > 0 ? trials : 200, grid, seed);
      const std::string path = out_path.empty() ? "fig2.csv" : out_path;
      greenmimo::emit_csv(table, path);
      std::cout << "wrote " << path << "\n";
      return kExitOk;
    }

    if (crossover->parsed()) {
      const int n_real = trials > 0 ? trials : 200;
      std::vector<greenmimo::ChannelRealization> realizations;
      realizations.reserve(static_cast<std::size_t>(n_real));
      for (int t = 0; t < n_real; ++t)
        realizations.push_back(greenmimo::sample_channel(
            cfg, greenmimo::mix_seed(seed, 0, static_cast<std::uint64_t>(t))));
      greenmimo::CrossoverResult res = greenmimo::crossover_rho(cfg, realizations);

      greenmimo::CurveTable table;
      table.x_name = "rho";
      table.x = res.rho_grid;
      table.config = cfg;
      table.seed = seed;
      table.trials = n_real;
      table.command = "crossover";
      greenmimo::CurveColumn m{"mimo_total", res.mean_mimo_total, {}, {}};
      greenmimo::CurveColumn s{"simo_total", res.mean_simo_total, {}, {}};
      for (std::size_t i = 0; i < res.rho_grid.size(); ++i) {
        m.se.push_back(0.0);
        s.se.push_back(0.0);
        m.count.push_back(res.feasible_trials[i]);
        s.count.push_back(res.feasible_trials[i]);
        table.notes.push_back(res.feasible_trials[i] == 0 ? "excluded: no feasible trial"
                                                          : "");
      }
      table.columns = {m, s};
      const std::string path = out_path.empty() ? "crossover.csv" : out_path;
      greenmimo::emit_csv(table, path);
      {
        std::ofstream meta(path + ".meta", std::ios::app);
        meta << "crossover_found=" << (res.found ? 1 : 0) << "\n";
        if (res.found) {
          meta << "rho_star=" << res.rho_star << "\n";
          meta << "residual_relative=" << res.residual_relative << "\n";
        } else {
          meta << "cheaper_mode="
               << (res.cheaper == greenmimo::Mode::Mimo ? "mimo" : "simo") << "\n";
        }
      }
      if (res.found)
        std::cout << "crossover rho* = " << res.rho_star
                  << " (residual " << res.residual_relative * 100.0 << "% of total)\n";
      else
        std::cout << "no crossover; "
                  << (res.cheaper == greenmimo::Mode::Mimo ? "MIMO" : "SIMO")
                  << " is uniformly cheaper\n";
      std::cout << "wrote " << path << "\n";
      int included = 0;
      for (int c : res.feasible_trials)
        if (c > 0) ++included;
      return included > 0 ? kExitOk : kExitInfeasible;
    }
  } catch (const greenmimo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case greenmimo::ErrorKind::Infeasible:
      case greenmimo::ErrorKind::InfeasiblePower:
      case greenmimo::ErrorKind::InfeasibleSer:
      case greenmimo::ErrorKind::Instability:
        return kExitInfeasible;
      default:
        return kExitUsage;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
