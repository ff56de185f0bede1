#include "greenmimo/selftest.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "greenmimo/errors.hpp"
#include "greenmimo/mmse.hpp"
#include "greenmimo/modopt.hpp"
#include "greenmimo/queueing.hpp"
#include "greenmimo/rng.hpp"
#include "greenmimo/simo.hpp"

namespace greenmimo {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

CheckResult check_haar_moment(const SelftestOptions& opts) {
  CheckResult res{"haar-fourth-moment", false, ""};
  const int n = 4;
  const double expected = -1.0 / (n * (n * n - 1.0));
  std::mt19937_64 engine(mix_seed(opts.seed, 0x6c656d31ULL, n));
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t s = 0; s < opts.haar_samples; ++s) {
    Eigen::MatrixXcd q = sample_haar_unitary(n, engine);
    // fourth moment with crossed conjugate rows, the pattern the
    // interference expansion actually produces
    const double v =
        (q(0, 0) * q(1, 1) * std::conj(q(1, 0)) * std::conj(q(0, 1))).real();
    sum += v;
    sum_sq += v * v;
  }
  const double m = sum / opts.haar_samples;
  const double var = (sum_sq - opts.haar_samples * m * m) / (opts.haar_samples - 1);
  const double se = std::sqrt(var / opts.haar_samples);
  res.passed = std::abs(m - expected) <= 4.0 * se;
  res.detail = "estimate " + fmt(m) + " vs " + fmt(expected) + " (4se = " +
               fmt(4.0 * se) + ")";
  return res;
}

CheckResult check_fixed_point(const SelftestOptions& opts) {
  CheckResult res{"total-power-fixed-point", false, ""};
  std::mt19937_64 engine(mix_seed(opts.seed, 0x70726f70ULL, 1));
  double worst = 0.0;
  try {
    for (int inst = 0; inst < opts.fixed_point_instances; ++inst) {
      RandomInstance ri = random_feasible_instance(engine);
      ModulationAllocation alloc = equal_rate_baseline(ri.cfg);
      SpectralSummary spec = ri.spec;
      if (opts.inject_f3_sign_fault) spec.f3 = -spec.f3;
      StreamPowerResult p = total_mimo_power(alloc, spec, ri.cfg, ri.cfg.per_user_ser());
      // recompute the per-stream split with the clean summary
      double sum = 0.0;
      for (int i = 0; i < ri.cfg.K; ++i)
        for (int j = 0; j < ri.cfg.N_t; ++j)
          sum += stream_power(eta(alloc.b(i, j),
                                  ri.cfg.per_user_ser()[std::size_t(i)],
                                  ri.cfg.R_s, ri.cfg.B),
                              p.P_total, ri.spec, ri.cfg.sigma2);
      worst = std::max(worst, std::abs(sum - p.P_total) / std::max(p.P_total, 1e-300));
    }
    res.passed = worst <= 1e-9;
  } catch (const Error& e) {
    res.passed = false;
    res.detail = std::string("error: ") + e.what();
    return res;
  }
  res.detail = "worst relative gap " + fmt(worst);
  return res;
}

CheckResult check_bruteforce(const SelftestOptions& opts) {
  CheckResult res{"constellation-vs-exhaustive", false, ""};
  std::mt19937_64 engine(mix_seed(opts.seed, 0x62727574ULL, 2));
  double worst = 0.0;
  bool monotone = true;
  for (int inst = 0; inst < opts.bruteforce_instances; ++inst) {
    RandomInstance ri = random_feasible_instance(engine);
    ri.cfg.K = 2;
    ri.cfg.b_total = 8;
    ri.cfg.b_min = 1;
    ri.cfg.rho = 0.5;
    // resample the channel for the adjusted geometry
    ri.real = sample_channel(ri.cfg, engine());
    ri.spec = spectral_functions(ri.real.eigenvalues, ri.cfg.alpha(), ri.cfg.tau);
    const std::vector<double> ser = ri.cfg.per_user_ser();

    auto [b_star, trace] = dinkelbach(ri.spec, ri.cfg, ser);
    for (std::size_t d = 1; d < trace.deltas.size(); ++d)
      if (trace.deltas[d] > trace.deltas[d - 1] * (1.0 + 1e-12)) monotone = false;
    auto power_of = [&](const ModulationAllocation& a) {
      auto [phi, psi] = objective_parts(a, ri.spec, ri.cfg, ser);
      return phi / psi;
    };
    ModulationAllocation rounded = round_allocation(b_star, power_of);
    const double p_solver = power_of(rounded);

    double p_best = std::numeric_limits<double>::infinity();
    ModulationAllocation trial = rounded;
    for (int b1 = 1; b1 <= 7; ++b1)
      for (int b2 = 1; b2 <= 7; ++b2) {
        trial.b << b1, 8 - b1, b2, 8 - b2;
        try {
          p_best = std::min(p_best, power_of(trial));
        } catch (const Error&) {
        }
      }
    worst = std::max(worst, (p_solver - p_best) / p_best);
  }
  res.passed = worst <= 5e-3 && monotone;
  res.detail = "worst excess over exhaustive " + fmt(worst) +
               (monotone ? "" : "; delta sequence not monotone");
  return res;
}

CheckResult check_queue(const SelftestOptions& opts) {
  CheckResult res{"mg1-discrete-event", false, ""};
  const double l = 1080.0, b = 12.0, rs = 1e5;
  const double p_s = packet_success(1e-2, l, b, 2);
  const double t_p = l / (b * rs);
  const double mu = b * rs * p_s / l;
  const double r = 0.5 * mu;  // intensity 0.5
  const double closed = mean_delay_closed_form(p_s, b, rs, l, r);
  Mg1Result sim = simulate_mg1(r, p_s, t_p, opts.queue_packets, opts.seed);
  const double gap = std::abs(sim.mean_delay - closed) / closed;
  const double pval = geometric_fit_pvalue(sim.attempt_histogram, p_s);
  res.passed = gap <= 0.02 && pval >= 0.01;
  res.detail = "delay gap " + fmt(gap) + ", service-pmf p-value " + fmt(pval);
  return res;
}

CheckResult check_norms(const SelftestOptions& opts) {
  CheckResult res{"frobenius-vs-selected-column", false, ""};
  SystemConfig cfg;
  cfg.K = 4;
  cfg.N_t = 2;
  cfg.N_r = 8;
  cfg.tau = 0.3;
  std::mt19937_64 engine(mix_seed(opts.seed, 0x6e6f726dULL, 3));
  int violations = 0;
  for (int t = 0; t < opts.norm_realizations; ++t) {
    ChannelRealization real = sample_channel(cfg, engine());
    SimoSelection sel = select_antennas(real, cfg);
    for (int i = 0; i < cfg.K; ++i) {
      const Eigen::Index off = static_cast<Eigen::Index>(i) * cfg.N_t;
      if (!(frobenius_norm_sq(real.H_hat.middleCols(off, cfg.N_t)) > sel.gain[i]))
        ++violations;
      if (!(frobenius_norm_sq(real.user_block(i, cfg.N_t)) >
            max_column_norm_sq(real.user_block(i, cfg.N_t))))
        ++violations;
    }
  }
  res.passed = violations == 0;
  res.detail = std::to_string(violations) + " violations over " +
               std::to_string(opts.norm_realizations) + " realizations";
  return res;
}

}  // namespace

RandomInstance random_feasible_instance(std::mt19937_64& engine) {
  auto uniform = [&engine]() {
    return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
  };
  for (int attempt = 0; attempt < 200; ++attempt) {
    RandomInstance ri;
    ri.cfg.K = 2 + static_cast<int>(engine() % 3);
    ri.cfg.N_t = 2;
    const int n = ri.cfg.stream_count();
    ri.cfg.N_r = n + 32 + static_cast<int>(engine() % 33);
    ri.cfg.sigma2 = 0.25 + 1.75 * uniform();
    ri.cfg.P_ref = ri.cfg.sigma2 * (100.0 + 300.0 * uniform());
    ri.cfg.tau = 0.15 * uniform();
    ri.cfg.b_total = 4 + 2 * static_cast<int>(engine() % 3);
    ri.cfg.b_min = 1;
    ri.cfg.rho = 0.5;
    ri.real = sample_channel(ri.cfg, engine());
    ri.spec = spectral_functions(ri.real.eigenvalues, ri.cfg.alpha(), ri.cfg.tau);
    try {
      ModulationAllocation alloc = equal_rate_baseline(ri.cfg);
      (void)objective_parts(alloc, ri.spec, ri.cfg, ri.cfg.per_user_ser());
      (void)total_mimo_power(alloc, ri.spec, ri.cfg, ri.cfg.per_user_ser());
      return ri;
    } catch (const Error&) {
      // infeasible draw; resample
    }
  }
  fail(ErrorKind::Infeasible, "could not draw a feasible random instance");
}

std::vector<CheckResult> run_selftest(const SelftestOptions& opts) {
  std::vector<CheckResult> results;
  results.push_back(check_haar_moment(opts));
  results.push_back(check_fixed_point(opts));
  results.push_back(check_bruteforce(opts));
  results.push_back(check_queue(opts));
  results.push_back(check_norms(opts));
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.passed) return false;
  return true;
}

}  // namespace greenmimo
