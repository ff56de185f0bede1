#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "greenmimo/channel.hpp"
#include "greenmimo/errors.hpp"
#include "greenmimo/mmse.hpp"
#include "greenmimo/selftest.hpp"
#include "greenmimo/simo.hpp"
#include "greenmimo/modopt.hpp"
#include "greenmimo/spectral.hpp"
#include "greenmimo/switching.hpp"

using namespace greenmimo;

namespace {

SystemConfig feasible_cfg() {
  // well-conditioned geometry on which both modes are comfortably feasible
  SystemConfig cfg;
  cfg.K = 4;
  cfg.N_t = 2;
  cfg.N_r = 64;
  cfg.sigma2 = 1.0;
  cfg.tau = 0.1;
  cfg.P_ref = 200.0;
  cfg.b_total = 6;
  cfg.b_min = 1;
  cfg.rho = 0.5;
  cfg.P_0 = 0.1;
  return cfg;
}

}  // namespace

TEST_CASE("antenna selection") {
  SUBCASE("single transmit antenna selects itself") {
    SystemConfig cfg;
    cfg.K = 3;
    cfg.N_t = 1;
    cfg.N_r = 6;
    ChannelRealization real = sample_channel(cfg, 4);
    SimoSelection sel = select_antennas(real, cfg);
    for (int i = 0; i < cfg.K; ++i) {
      CHECK(sel.antenna_index[std::size_t(i)] == 0);
      CHECK(sel.gain[i] ==
            doctest::Approx(real.H_hat.col(i).squaredNorm()).epsilon(1e-14));
    }
  }

  SUBCASE("picks the larger column") {
    SystemConfig cfg;
    cfg.K = 1;
    cfg.N_t = 2;
    cfg.N_r = 2;
    cfg.tau = 0.0;
    ChannelRealization real = sample_channel(cfg, 4);
    real.H_hat.col(0) << std::complex<double>(1.0, 0.0), 0.0;   // norm^2 = 1.0
    real.H_hat.col(1) << std::complex<double>(0.0, 1.5), 0.5;   // norm^2 = 2.5
    real.H = real.H_hat;
    SimoSelection sel = select_antennas(real, cfg);
    CHECK(sel.antenna_index[0] == 1);
    CHECK(sel.gain[0] == doctest::Approx(2.5).epsilon(1e-14));
    CHECK((sel.effective_channel.col(0) - real.H.col(1)).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("selection follows the estimated channel, not the true one") {
    SystemConfig cfg;
    cfg.K = 1;
    cfg.N_t = 2;
    cfg.N_r = 2;
    cfg.tau = 0.9;
    ChannelRealization real = sample_channel(cfg, 4);
    real.H_hat.col(0) << std::complex<double>(3.0, 0.0), 0.0;
    real.H_hat.col(1) << std::complex<double>(0.1, 0.0), 0.0;
    // true channel reversed on purpose
    real.H.col(0) << std::complex<double>(0.1, 0.0), 0.0;
    real.H.col(1) << std::complex<double>(3.0, 0.0), 0.0;
    SimoSelection sel = select_antennas(real, cfg);
    CHECK(sel.antenna_index[0] == 0);
  }

  SUBCASE("selected gain never exceeds the block Frobenius norm") {
    SystemConfig cfg = feasible_cfg();
    for (int t = 0; t < 1000; ++t) {
      ChannelRealization real = sample_channel(cfg, 100 + t);
      SimoSelection sel = select_antennas(real, cfg);
      for (int i = 0; i < cfg.K; ++i) {
        const Eigen::Index off = Eigen::Index(i) * cfg.N_t;
        const double frob = frobenius_norm_sq(real.H_hat.middleCols(off, cfg.N_t));
        CHECK(sel.gain[i] <= frob);
        CHECK(sel.gain[i] < frob);  // strict for two nonzero columns
      }
      // spectral summary runs over exactly K eigenvalues
      CHECK(sel.spectral.n == cfg.K);
    }
  }
}

TEST_CASE("simo user power") {
  SystemConfig cfg = feasible_cfg();
  ChannelRealization real = sample_channel(cfg, 21);
  SimoSelection sel = select_antennas(real, cfg);

  SUBCASE("round trip recovers the required SINR") {
    std::mt19937_64 engine(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
      double p_total = 1.0 + 30.0 * unif(engine);
      double p = simo_user_power(cfg.b_total, 1e-3, p_total, sel, cfg);
      if (p > p_total) continue;
      double back = sinr_per_stream(p, p_total, sel.spectral, cfg.sigma2);
      CHECK(back ==
            doctest::Approx(eta(cfg.b_total, 1e-3, cfg.R_s, cfg.B)).epsilon(1e-9));
    }
  }

  SUBCASE("tau = 1 is infeasible") {
    SystemConfig blind = cfg;
    blind.tau = 1.0;
    ChannelRealization r2 = sample_channel(blind, 21);
    SimoSelection s2 = select_antennas(r2, blind);
    CHECK_THROWS_AS(simo_user_power(blind.b_total, 1e-3, 10.0, s2, blind), Error);
  }

  SUBCASE("K = 1 is a singular configuration for the power model") {
    SystemConfig one = cfg;
    one.K = 1;
    ChannelRealization r1 = sample_channel(one, 3);
    SimoSelection s1 = select_antennas(r1, one);  // selection itself is fine
    CHECK(s1.antenna_index.size() == 1);
    CHECK_THROWS_AS(simo_user_power(one.b_total, 1e-3, 10.0, s1, one), Error);
    CHECK_THROWS_AS(total_simo_power(one, s1, {1e-3}), Error);
  }
}

TEST_CASE("total simo power") {
  SystemConfig cfg = feasible_cfg();
  ChannelRealization real = sample_channel(cfg, 33);
  SimoSelection sel = select_antennas(real, cfg);

  SUBCASE("per-user powers sum to the aggregate fixed point") {
    SimoPower p = total_simo_power(cfg, sel, cfg.per_user_ser());
    std::vector<std::pair<double, double>> groups;
    for (double ser : cfg.per_user_ser())
      groups.emplace_back(1.0, eta(cfg.b_total, ser, cfg.R_s, cfg.B));
    double agg = total_power_fixed_point(groups, sel.spectral, cfg.sigma2);
    CHECK(std::abs(p.transmit - agg) <= 1e-9 * agg);
  }

  SUBCASE("circuit power is one term per user") {
    SystemConfig ten = cfg;
    ten.K = 10;
    ten.N_r = 96;
    ten.P_0 = 0.1;
    ChannelRealization r10 = sample_channel(ten, 9);
    SimoSelection s10 = select_antennas(r10, ten);
    SimoPower p = total_simo_power(ten, s10, ten.per_user_ser());
    CHECK(p.circuit == doctest::Approx(1.0).epsilon(1e-15));
  }

  SUBCASE("tighter SER class costs strictly more") {
    std::vector<double> tolerant(std::size_t(cfg.K), 1e-2);
    std::vector<double> mixed = tolerant;
    mixed[0] = 1e-4;
    double p_tol = total_simo_power(cfg, sel, tolerant).transmit;
    double p_mix = total_simo_power(cfg, sel, mixed).transmit;
    CHECK(p_mix > p_tol);
  }
}

TEST_CASE("evaluate mode") {
  SystemConfig cfg = feasible_cfg();
  ChannelRealization real = sample_channel(cfg, 55);

  SUBCASE("report invariants") {
    PowerReport m = evaluate_mode(Mode::Mimo, real, cfg);
    PowerReport s = evaluate_mode(Mode::Simo, real, cfg);
    REQUIRE(m.feasible);
    REQUIRE(s.feasible);
    CHECK(m.circuit_power == doctest::Approx(cfg.K * cfg.N_t * cfg.P_0));
    CHECK(s.circuit_power == doctest::Approx(cfg.K * cfg.P_0));
    CHECK(m.total_power == doctest::Approx(m.transmit_power + m.circuit_power));
    CHECK(s.total_power == doctest::Approx(s.transmit_power + s.circuit_power));
    CHECK(m.energy_efficiency == doctest::Approx(m.throughput / m.total_power));
    CHECK(m.throughput == doctest::Approx(s.throughput));  // matched throughput
    CHECK(m.delay_sensitive < m.delay_tolerant);
  }

  SUBCASE("textbook circuit powers at K=10, N_t=2") {
    SystemConfig ten = cfg;
    ten.K = 10;
    ten.N_r = 96;
    ten.P_0 = 0.1;
    ChannelRealization r10 = sample_channel(ten, 7);
    PowerReport m = evaluate_mode(Mode::Mimo, r10, ten);
    PowerReport s = evaluate_mode(Mode::Simo, r10, ten);
    CHECK(m.circuit_power == doctest::Approx(2.0));
    CHECK(s.circuit_power == doctest::Approx(1.0));
  }

  SUBCASE("infeasible mode is reported, not thrown") {
    SystemConfig overloaded;  // textbook defaults: rank-4 Gram, 20 streams
    ChannelRealization r = sample_channel(overloaded, 2);
    PowerReport m = evaluate_mode(Mode::Mimo, r, overloaded);
    CHECK_FALSE(m.feasible);
    CHECK_FALSE(m.infeasible_reason.empty());
  }

  SUBCASE("delay classes cover both extremes of rho") {
    SystemConfig all_heavy = cfg;
    all_heavy.rho = 1.0;
    PowerReport m = evaluate_mode(Mode::Mimo, real, all_heavy);
    CHECK(std::isnan(m.delay_tolerant));
    CHECK(m.delay_sensitive > 0.0);

    SystemConfig none_heavy = cfg;
    none_heavy.rho = 0.0;
    PowerReport m0 = evaluate_mode(Mode::Mimo, real, none_heavy);
    CHECK(std::isnan(m0.delay_sensitive));
    CHECK(m0.delay_tolerant > 0.0);
  }
}

TEST_CASE("select mode") {
  PowerReport m, s;
  m.mode = Mode::Mimo;
  s.mode = Mode::Simo;
  m.feasible = s.feasible = true;
  m.total_power = 5.0;
  s.total_power = 7.0;
  CHECK(select_mode(m, s) == Mode::Mimo);

  m.total_power = 9.0;
  CHECK(select_mode(m, s) == Mode::Simo);

  m.total_power = 7.0;  // tie goes to MIMO
  CHECK(select_mode(m, s) == Mode::Mimo);

  // scaling both totals cannot change the winner
  m.total_power = 5.0;
  s.total_power = 7.0;
  PowerReport m2 = m, s2 = s;
  m2.total_power *= 13.0;
  s2.total_power *= 13.0;
  CHECK(select_mode(m2, s2) == select_mode(m, s));

  s.feasible = false;
  m.total_power = 1e9;
  CHECK(select_mode(m, s) == Mode::Mimo);
  m.feasible = false;
  s.feasible = true;
  CHECK(select_mode(m, s) == Mode::Simo);
  s.feasible = false;
  CHECK_THROWS_AS(select_mode(m, s), Error);
}

TEST_CASE("energy efficiency of the selected mode dominates") {
  SystemConfig cfg = feasible_cfg();
  for (int t = 0; t < 50; ++t) {
    ChannelRealization real = sample_channel(cfg, 900 + t);
    PowerReport m = evaluate_mode(Mode::Mimo, real, cfg);
    PowerReport s = evaluate_mode(Mode::Simo, real, cfg);
    if (!(m.feasible && s.feasible)) continue;
    Mode pick = select_mode(m, s);
    const PowerReport& win = pick == Mode::Mimo ? m : s;
    const PowerReport& lose = pick == Mode::Mimo ? s : m;
    CHECK(win.energy_efficiency >= lose.energy_efficiency);
  }
}

TEST_CASE("circuit power dominates at loose SER targets") {
  SystemConfig cfg = feasible_cfg();
  cfg.rho = 0.0;
  cfg.P_0 = 2.0;
  // tolerant class just inside the feasibility bound of the per-stream
  // constellation: required SINR, and with it transmit power, collapses
  cfg.b_total = 4;
  cfg.b_min = 2;
  cfg.p_e_tolerant = ser_feasibility_bound(2.0) * (1.0 - 1e-9);
  ChannelRealization real = sample_channel(cfg, 71);
  SpectralSummary spec = spectral_functions(real.eigenvalues, cfg.alpha(), cfg.tau);
  const std::vector<double> ser = cfg.per_user_ser();

  StreamPowerResult m = total_mimo_power(equal_rate_baseline(cfg), spec, cfg, ser);
  SimoSelection sel = select_antennas(real, cfg);
  SimoPower s = total_simo_power(cfg, sel, ser);
  CHECK(m.P_total < 1e-6);
  const double mimo_total = m.P_total + cfg.K * cfg.N_t * cfg.P_0;
  CHECK(mimo_total == doctest::Approx(cfg.K * cfg.N_t * cfg.P_0).epsilon(1e-6));
  // with transmit power out of the picture the smaller circuit bill wins
  CHECK(s.total() < mimo_total);

  // the traffic model refuses such SERs outright: nothing gets through
  PowerReport rep = evaluate_mode(Mode::Mimo, real, cfg);
  CHECK_FALSE(rep.feasible);
}

TEST_CASE("crossover search") {
  SUBCASE("zero circuit power leaves MIMO uniformly cheaper") {
    SystemConfig cfg = feasible_cfg();
    cfg.P_0 = 0.0;
    std::vector<ChannelRealization> reals;
    for (int t = 0; t < 200; ++t) reals.push_back(sample_channel(cfg, 3000 + t));
    CrossoverResult res = crossover_rho(cfg, reals);
    CHECK_FALSE(res.found);
    CHECK(res.cheaper == Mode::Mimo);
    for (std::size_t i = 0; i < res.rho_grid.size(); ++i)
      CHECK(res.mean_mimo_total[i] < res.mean_simo_total[i]);
  }

  SUBCASE("tuned circuit power produces an interior crossover") {
    SystemConfig cfg = feasible_cfg();
    std::vector<ChannelRealization> reals;
    for (int t = 0; t < 60; ++t) reals.push_back(sample_channel(cfg, 5000 + t));

    // pin the circuit gap between the transmit gaps at the two extremes
    SystemConfig lo = cfg, hi = cfg;
    lo.rho = 0.0;
    hi.rho = 1.0;
    double d0 = 0.0, d1 = 0.0;
    for (const auto& r : reals) {
      d0 += evaluate_mode(Mode::Simo, r, lo).transmit_power -
            evaluate_mode(Mode::Mimo, r, lo).transmit_power;
      d1 += evaluate_mode(Mode::Simo, r, hi).transmit_power -
            evaluate_mode(Mode::Mimo, r, hi).transmit_power;
    }
    d0 /= reals.size();
    d1 /= reals.size();
    REQUIRE(d1 > d0);
    cfg.P_0 = 0.5 * (d0 + d1) / (cfg.K * (cfg.N_t - 1));

    CrossoverResult res = crossover_rho(cfg, reals);
    REQUIRE(res.found);
    CHECK(res.rho_star > 0.0);
    CHECK(res.rho_star < 1.0);
    CHECK(res.residual_relative <= 0.01);
  }
}
