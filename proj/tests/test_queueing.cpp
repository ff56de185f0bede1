#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "greenmimo/errors.hpp"
#include "greenmimo/queueing.hpp"

using namespace greenmimo;

TEST_CASE("packet success probability") {
  CHECK(packet_success(0.0, 1080, 12, 2) == 1.0);
  CHECK(packet_success(1e-2, 1080, 12, 2) ==
        doctest::Approx(std::pow(0.99, 180)).epsilon(1e-15));
  CHECK(packet_success(1e-2, 1080, 12, 2) == doctest::Approx(0.1639).epsilon(1e-3));
  CHECK(packet_success(1.0 - 1e-12, 1080, 12, 2) < 1e-300);
}

TEST_CASE("throughput") {
  CHECK(throughput(1.0, 12, 1e5, 1080, 0) == doctest::Approx(12e5).epsilon(1e-15));
  const double p_s = packet_success(1e-2, 1080, 12, 2);
  CHECK(throughput(p_s, 12, 1e5, 1080, 32) == doctest::Approx(1.908e5).epsilon(1e-3));
  CHECK(throughput(0.0, 12, 1e5, 1080, 32) == 0.0);
}

TEST_CASE("delay statistics") {
  SUBCASE("zero load with certain success gives the bare transmission time") {
    QueueStats q = delay_stats(1.0, 12, 1e5, 1080, 32, 0.0);
    CHECK(q.mean_delay == doctest::Approx(q.t_p).epsilon(1e-15));
  }

  SUBCASE("closed form equals the composed value on random draws") {
    std::mt19937_64 engine(3);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
      double p_s = 0.05 + 0.95 * unif(engine);
      double b = 2.0 + 18.0 * unif(engine);
      double rs = 1e4 + 1e6 * unif(engine);
      double l = 200.0 + 2000.0 * unif(engine);
      double mu = b * rs * p_s / l;
      double r = mu * 0.95 * unif(engine);
      QueueStats q = delay_stats(p_s, b, rs, l, 32, r);
      double closed = mean_delay_closed_form(p_s, b, rs, l, r);
      CHECK(q.mean_delay == doctest::Approx(closed).epsilon(1e-12));
      CHECK(q.mean_delay >= q.mean_service);
      CHECK(q.mean_service == doctest::Approx(q.t_p / p_s).epsilon(1e-15));
    }
  }

  SUBCASE("near saturation the delay explodes") {
    const double p_s = 0.8, b = 12, rs = 1e5, l = 1080;
    const double mu = b * rs * p_s / l;
    QueueStats q = delay_stats(p_s, b, rs, l, 32, 0.999 * mu);
    CHECK(q.mean_delay > 100.0 * q.t_p);
  }

  SUBCASE("at or above the service rate the queue is unstable") {
    const double p_s = 0.5, b = 12, rs = 1e5, l = 1080;
    const double mu = b * rs * p_s / l;
    CHECK_THROWS_AS(delay_stats(p_s, b, rs, l, 32, mu), Error);
    try {
      delay_stats(p_s, b, rs, l, 32, 1.5 * mu);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Instability);
    }
  }

  SUBCASE("delay decreases as packet success rises") {
    double prev = 1e300;
    for (double p_s : {0.2, 0.4, 0.6, 0.8, 0.99}) {
      QueueStats q = delay_stats(p_s, 12, 1e5, 1080, 32, 1.0);
      CHECK(q.mean_delay < prev);
      prev = q.mean_delay;
    }
  }
}

TEST_CASE("discrete-event oracle agrees with the closed form") {
  const double p_s = packet_success(1e-2, 1080, 12, 2);
  const double t_p = 1080.0 / (12.0 * 1e5);
  const double mu = p_s / t_p;
  const double r = 0.5 * mu;
  const double closed = mean_delay_closed_form(p_s, 12, 1e5, 1080, r);
  Mg1Result sim = simulate_mg1(r, p_s, t_p, 1000000, 7);
  CHECK(std::abs(sim.mean_delay - closed) / closed < 0.02);
}

TEST_CASE("service attempts follow the geometric law") {
  const double p_s = 0.3;
  Mg1Result sim = simulate_mg1(10.0, p_s, 1e-3, 100000, 11);
  std::int64_t total = 0;
  for (auto c : sim.attempt_histogram) total += c;
  CHECK(total == sim.packets);
  CHECK(geometric_fit_pvalue(sim.attempt_histogram, p_s) >= 0.01);
  // a wrong success probability must be rejected
  CHECK(geometric_fit_pvalue(sim.attempt_histogram, 0.45) < 0.01);
}

TEST_CASE("chi-square tail probabilities") {
  // reference quantiles: P(chi2_10 > 23.209) = 0.01, P(chi2_5 > 11.07) = 0.05
  CHECK(chi_square_pvalue(23.209, 10) == doctest::Approx(0.01).epsilon(5e-3));
  CHECK(chi_square_pvalue(11.0705, 5) == doctest::Approx(0.05).epsilon(5e-3));
  CHECK(chi_square_pvalue(0.0, 3) == 1.0);
}
