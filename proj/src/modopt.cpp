#include "greenmimo/modopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "greenmimo/errors.hpp"
#include "greenmimo/rng.hpp"

namespace greenmimo {

namespace {

// 1/(c2 + c1/eta) with the eta = 0 limit evaluating to 0.
double stream_term(double eta_val, const SpectralSummary& spec) {
  if (eta_val == 0.0) return 0.0;
  const double den = spec.c2 + spec.c1 / eta_val;
  if (!(den > 0.0))
    fail(ErrorKind::InfeasiblePower,
         "stream denominator c2 + c1/eta nonpositive at eta = " +
             std::to_string(eta_val));
  return 1.0 / den;
}

double stream_term_derivative(double b, double ser, const SpectralSummary& spec,
                              const SystemConfig& cfg) {
  const double e = eta(b, ser, cfg.R_s, cfg.B);
  const double de = eta_derivative(b, ser, cfg.R_s, cfg.B);
  const double den = spec.c2 * e + spec.c1;
  return spec.c1 * de / (den * den);
}

// Largest admissible exponent for one stream: the box upper bound shrunk
// below the per-stream singularity eta = c1/(-c2) when c2 < 0.
double stream_upper_bound(double ser, const SpectralSummary& spec,
                          const SystemConfig& cfg) {
  double hi = static_cast<double>(cfg.b_total) - (cfg.N_t - 1) * cfg.b_min;
  if (spec.c2 >= 0.0) return hi;
  const double eta_cap = spec.c1 / (-spec.c2);
  if (eta(cfg.b_min, ser, cfg.R_s, cfg.B) >= eta_cap)
    fail(ErrorKind::InfeasiblePower,
         "even b_min exceeds the per-stream SINR cap on this channel");
  if (eta(hi, ser, cfg.R_s, cfg.B) < eta_cap) return hi;
  // bisect eta(b) = eta_cap, then back off
  double lo = cfg.b_min, up = hi;
  for (int it = 0; it < 200 && up - lo > 1e-12; ++it) {
    double mid = 0.5 * (lo + up);
    (eta(mid, ser, cfg.R_s, cfg.B) < eta_cap ? lo : up) = mid;
  }
  return lo - 1e-9 * std::max(1.0, lo);
}

// Inverts phi'(b) = target on [lo, hi]; phi' is increasing where the
// objective is convex.
double invert_marginal(double target, double ser, const SpectralSummary& spec,
                       const SystemConfig& cfg, double lo, double hi) {
  double a = lo, b = hi;
  for (int it = 0; it < 200 && b - a > 1e-13 * std::max(1.0, b); ++it) {
    double mid = 0.5 * (a + b);
    (stream_term_derivative(mid, ser, spec, cfg) < target ? a : b) = mid;
  }
  return 0.5 * (a + b);
}

// Per-user subproblem: min sum_j g(b_j) s.t. sum_j b_j = b_total and
// b_j in [b_min, cap]. The positive weight sigma_hat^2 f3 + delta c3 is
// common to every stream, so it cancels from the argmin and the subproblem
// is independent of delta.
Eigen::VectorXd solve_user(double ser, const SpectralSummary& spec,
                           const SystemConfig& cfg) {
  const int n_t = cfg.N_t;
  const double hi = stream_upper_bound(ser, spec, cfg);
  if (hi * n_t < cfg.b_total - 1e-9)
    fail(ErrorKind::InfeasiblePower,
         "stream SINR cap leaves no feasible allocation for this user");

  Eigen::VectorXd trial(n_t);
  if (n_t == 1) {
    trial[0] = cfg.b_total;
    return trial;
  }

  const double lo = cfg.b_min;
  const double d_lo = stream_term_derivative(lo, ser, spec, cfg);
  const double d_hi = stream_term_derivative(hi, ser, spec, cfg);
  const double s_lo = std::min(d_lo, d_hi);  // tolerate non-monotone marginals
  const double s_hi = std::max(d_lo, d_hi);

  auto fill = [&](double s, Eigen::VectorXd& out) {
    double total = 0.0;
    for (int j = 0; j < n_t; ++j) {
      double bj;
      if (s <= d_lo)
        bj = lo;
      else if (s >= d_hi)
        bj = hi;
      else
        bj = invert_marginal(s, ser, spec, cfg, lo, hi);
      out[j] = bj;
      total += bj;
    }
    return total;
  };

  double a = s_lo, b = s_hi;
  for (int it = 0; it < 200; ++it) {
    double s = 0.5 * (a + b);
    double total = fill(s, trial);
    if (std::abs(total - cfg.b_total) <= 1e-11 * std::max(1.0, double(cfg.b_total)))
      break;
    (total < cfg.b_total ? a : b) = s;
  }
  fill(0.5 * (a + b), trial);

  // exact primal feasibility: spread the residual over unclamped streams
  const double residual = cfg.b_total - trial.sum();
  std::vector<int> unclamped;
  for (int j = 0; j < n_t; ++j)
    if (trial[j] > lo + 1e-10 && trial[j] < hi - 1e-10) unclamped.push_back(j);
  if (unclamped.empty())
    for (int j = 0; j < n_t; ++j) unclamped.push_back(j);
  const double share = residual / static_cast<double>(unclamped.size());
  for (int j : unclamped) trial[j] += share;
  trial[unclamped.back()] += cfg.b_total - trial.sum();
  return trial;
}

double class_stream_sum(const ClassRows& rows, const std::vector<SerClass>& classes,
                        const SpectralSummary& spec, const SystemConfig& cfg) {
  if (rows.size() != classes.size())
    fail(ErrorKind::Structural, "one allocation row per class required");
  double s = 0.0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (classes[c].users < 0.0) fail(ErrorKind::Structural, "negative class weight");
    if (classes[c].users == 0.0) continue;
    double user_sum = 0.0;
    for (Eigen::Index j = 0; j < rows[c].size(); ++j)
      user_sum += stream_term(eta(rows[c][j], classes[c].ser, cfg.R_s, cfg.B), spec);
    s += classes[c].users * user_sum;
  }
  return s;
}

Eigen::VectorXd round_single_row(
    const Eigen::VectorXd& row, int b_total, int b_min,
    const std::function<double(const Eigen::VectorXd&)>& power_of);

}  // namespace

std::pair<double, double> objective_parts_by_class(
    const ClassRows& rows, const std::vector<SerClass>& classes,
    const SpectralSummary& spec, const SystemConfig& cfg) {
  const double s = class_stream_sum(rows, classes, spec, cfg);
  const double phi = spec.f3 * spec.sigma_hat_sq(cfg.sigma2) * s;
  const double psi = 1.0 - spec.c3 * s;
  if (!(psi > 0.0))
    fail(ErrorKind::Infeasible, "Psi <= 0: requested rates unsupportable");
  return {phi, psi};
}

double total_power_by_class(const ClassRows& rows,
                            const std::vector<SerClass>& classes,
                            const SpectralSummary& spec,
                            const SystemConfig& cfg) {
  auto [phi, psi] = objective_parts_by_class(rows, classes, spec, cfg);
  return phi / psi;
}

std::pair<ClassRows, DinkelbachTrace> dinkelbach_by_class(
    const std::vector<SerClass>& classes, const SpectralSummary& spec,
    const SystemConfig& cfg, double tol, int max_iter) {
  if (cfg.b_total < cfg.N_t * cfg.b_min)
    fail(ErrorKind::Structural, "b_total < N_t*b_min leaves no feasible point");

  ClassRows current(classes.size(),
                    Eigen::VectorXd::Constant(cfg.N_t, double(cfg.b_total) / cfg.N_t));
  DinkelbachTrace trace;
  double delta = total_power_by_class(current, classes, spec, cfg);
  trace.deltas.push_back(delta);

#ifndef NDEBUG
  if (!classes.empty())
    trace.convexity_warnings =
        probe_convexity(spec, cfg, classes.front().ser, delta, 8, 0xC0FFEE);
#endif

  ClassRows best = current;
  double best_delta = delta;

  for (int k = 1; k <= max_iter; ++k) {
    trace.iterations = k;
    // the per-user subproblem does not depend on delta (common positive
    // weight), but the Dinkelbach residual and updates do
    ClassRows next(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c)
      next[c] = solve_user(classes[c].ser, spec, cfg);
    auto [phi, psi] = objective_parts_by_class(next, classes, spec, cfg);
    const double f = phi - delta * psi;
    trace.final_f = f;
    const double next_delta = phi / psi;
    if (next_delta < best_delta) {
      best_delta = next_delta;
      best = next;
    }
    if (std::abs(f) <= tol * std::max(1.0, delta)) {
      trace.converged = true;
      break;
    }
    if (next_delta > delta) break;  // inner solve lost monotonicity; keep best
    delta = next_delta;
    trace.deltas.push_back(delta);
  }
  return {best, trace};
}

ClassRows round_class_rows(const ClassRows& rows,
                           const std::vector<SerClass>& classes,
                           const SpectralSummary& spec, const SystemConfig& cfg) {
  ClassRows out = rows;
  for (std::size_t c = 0; c < rows.size(); ++c) {
    auto power_of = [&](const Eigen::VectorXd& candidate) {
      ClassRows trial = out;
      trial[c] = candidate;
      return total_power_by_class(trial, classes, spec, cfg);
    };
    out[c] = round_single_row(rows[c], cfg.b_total, cfg.b_min, power_of);
  }
  return out;
}

std::vector<SerClass> group_users_by_ser(const std::vector<double>& per_user_ser) {
  std::vector<SerClass> classes;
  for (double ser : per_user_ser) {
    bool found = false;
    for (auto& c : classes)
      if (c.ser == ser) {
        c.users += 1.0;
        found = true;
        break;
      }
    if (!found) classes.push_back({1.0, ser});
  }
  return classes;
}

namespace {

ClassRows rows_from_allocation(const ModulationAllocation& alloc,
                               const std::vector<double>& per_user_ser,
                               std::vector<SerClass>& classes) {
  // Users of one SER class may still carry distinct rows in a hand-built
  // allocation; treat every (ser, row) pair as its own class.
  classes.clear();
  ClassRows rows;
  for (Eigen::Index i = 0; i < alloc.b.rows(); ++i) {
    const double ser = per_user_ser[static_cast<std::size_t>(i)];
    bool found = false;
    for (std::size_t c = 0; c < rows.size(); ++c)
      if (classes[c].ser == ser &&
          (rows[c].array() == alloc.b.row(i).transpose().array()).all()) {
        classes[c].users += 1.0;
        found = true;
        break;
      }
    if (!found) {
      classes.push_back({1.0, ser});
      rows.push_back(alloc.b.row(i).transpose());
    }
  }
  return rows;
}

}  // namespace

std::pair<double, double> objective_parts(const ModulationAllocation& alloc,
                                          const SpectralSummary& spec,
                                          const SystemConfig& cfg,
                                          const std::vector<double>& per_user_ser) {
  alloc.validate();
  if (static_cast<int>(per_user_ser.size()) != cfg.K ||
      alloc.b.rows() != cfg.K || alloc.b.cols() != cfg.N_t)
    fail(ErrorKind::Structural, "allocation/SER shape must match the config");
  std::vector<SerClass> classes;
  ClassRows rows = rows_from_allocation(alloc, per_user_ser, classes);
  return objective_parts_by_class(rows, classes, spec, cfg);
}

ModulationAllocation inner_solve(double delta, const SpectralSummary& spec,
                                 const SystemConfig& cfg,
                                 const std::vector<double>& per_user_ser) {
  if (delta < 0.0) fail(ErrorKind::Structural, "delta must be >= 0");
  if (cfg.b_total < cfg.N_t * cfg.b_min)
    fail(ErrorKind::Structural, "b_total < N_t*b_min leaves no feasible point");
  if (static_cast<int>(per_user_ser.size()) != cfg.K)
    fail(ErrorKind::Structural, "per_user_ser length must equal K");

  ModulationAllocation alloc;
  alloc.b.resize(cfg.K, cfg.N_t);
  alloc.b_total = cfg.b_total;
  alloc.b_min = cfg.b_min;

  std::map<double, Eigen::VectorXd> cache;
  for (int i = 0; i < cfg.K; ++i) {
    const double ser = per_user_ser[std::size_t(i)];
    auto it = cache.find(ser);
    if (it == cache.end()) it = cache.emplace(ser, solve_user(ser, spec, cfg)).first;
    alloc.b.row(i) = it->second.transpose();
  }
  return alloc;
}

std::pair<ModulationAllocation, DinkelbachTrace> dinkelbach(
    const SpectralSummary& spec, const SystemConfig& cfg,
    const std::vector<double>& per_user_ser, double tol, int max_iter) {
  if (static_cast<int>(per_user_ser.size()) != cfg.K)
    fail(ErrorKind::Structural, "per_user_ser length must equal K");
  std::vector<SerClass> classes = group_users_by_ser(per_user_ser);
  auto [rows, trace] = dinkelbach_by_class(classes, spec, cfg, tol, max_iter);

  ModulationAllocation alloc;
  alloc.b.resize(cfg.K, cfg.N_t);
  alloc.b_total = cfg.b_total;
  alloc.b_min = cfg.b_min;
  for (int i = 0; i < cfg.K; ++i) {
    const double ser = per_user_ser[std::size_t(i)];
    for (std::size_t c = 0; c < classes.size(); ++c)
      if (classes[c].ser == ser) {
        alloc.b.row(i) = rows[c].transpose();
        break;
      }
  }
  return {alloc, trace};
}

namespace {

Eigen::VectorXd round_single_row(
    const Eigen::VectorXd& row, int b_total, int b_min,
    const std::function<double(const Eigen::VectorXd&)>& power_of) {
  const int n_t = static_cast<int>(row.size());
  Eigen::VectorXd base(n_t);
  std::vector<int> fractional;
  int base_sum = 0;
  for (int j = 0; j < n_t; ++j) {
    double fl = std::floor(row[j] + 1e-12);
    double fr = row[j] - fl;
    base[j] = fl;
    base_sum += static_cast<int>(fl);
    if (fr > 1e-12 && fr < 1.0 - 1e-12) {
      fractional.push_back(j);
    } else if (fr >= 1.0 - 1e-12) {
      base[j] += 1.0;
      ++base_sum;
    }
  }
  const int deficit = b_total - base_sum;
  if (deficit < 0 || deficit > static_cast<int>(fractional.size()))
    fail(ErrorKind::Structural, "rounding cannot preserve the row sum");

  struct Candidate {
    Eigen::VectorXd b;
  };
  std::vector<Candidate> best_set;
  double best_dev = std::numeric_limits<double>::infinity();
  const int m = static_cast<int>(fractional.size());
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    if (__builtin_popcount(mask) != deficit) continue;
    Eigen::VectorXd cand = base;
    for (int t = 0; t < m; ++t)
      if (mask & (1u << t)) cand[fractional[std::size_t(t)]] += 1.0;
    bool ok = true;
    double dev = 0.0;
    for (int j = 0; j < n_t; ++j) {
      if (cand[j] < b_min - 1e-9) {
        ok = false;
        break;
      }
      dev += std::abs(cand[j] - row[j]);
    }
    if (!ok) continue;
    if (dev < best_dev - 1e-12) {
      best_dev = dev;
      best_set.clear();
    }
    if (dev <= best_dev + 1e-12) best_set.push_back({cand});
  }
  if (best_set.empty()) fail(ErrorKind::Structural, "no feasible rounding");

  // tie: lower total power wins, then the more balanced row, then the
  // lexicographically largest (descending) pattern
  std::size_t chosen = 0;
  if (best_set.size() > 1) {
    auto power_for = [&](const Eigen::VectorXd& b) {
      if (!power_of) return 0.0;
      try {
        return power_of(b);
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    auto lex_greater = [n_t](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
      for (int j = 0; j < n_t; ++j) {
        if (a[j] > b[j] + 1e-12) return true;
        if (a[j] < b[j] - 1e-12) return false;
      }
      return false;
    };
    double best_p = power_for(best_set[0].b);
    double best_spread = best_set[0].b.maxCoeff() - best_set[0].b.minCoeff();
    for (std::size_t c = 1; c < best_set.size(); ++c) {
      const double p = power_for(best_set[c].b);
      const double spread = best_set[c].b.maxCoeff() - best_set[c].b.minCoeff();
      bool better;
      if (p < best_p - 1e-12)
        better = true;
      else if (p > best_p + 1e-12)
        better = false;
      else if (spread < best_spread - 1e-12)
        better = true;
      else if (spread > best_spread + 1e-12)
        better = false;
      else
        better = lex_greater(best_set[c].b, best_set[chosen].b);
      if (better) {
        chosen = c;
        best_p = p;
        best_spread = spread;
      }
    }
  }
  return best_set[chosen].b;
}

}  // namespace

ModulationAllocation round_allocation(
    const ModulationAllocation& b_star,
    const std::function<double(const ModulationAllocation&)>& power_of) {
  b_star.validate();
  ModulationAllocation out = b_star;
  for (Eigen::Index i = 0; i < b_star.b.rows(); ++i) {
    std::function<double(const Eigen::VectorXd&)> row_power;
    if (power_of)
      row_power = [&, i](const Eigen::VectorXd& candidate) {
        ModulationAllocation trial = out;
        trial.b.row(i) = candidate.transpose();
        return power_of(trial);
      };
    out.b.row(i) =
        round_single_row(b_star.b.row(i), b_star.b_total, b_star.b_min, row_power)
            .transpose();
  }
  return out;
}

ModulationAllocation equal_rate_baseline(const SystemConfig& cfg) {
  if (cfg.b_total % cfg.N_t != 0)
    fail(ErrorKind::Structural,
         "b_total = " + std::to_string(cfg.b_total) +
             " is not divisible by N_t = " + std::to_string(cfg.N_t));
  ModulationAllocation alloc;
  alloc.b = Eigen::MatrixXd::Constant(cfg.K, cfg.N_t, cfg.b_total / cfg.N_t);
  alloc.b_total = cfg.b_total;
  alloc.b_min = cfg.b_min;
  return alloc;
}

int probe_convexity(const SpectralSummary& spec, const SystemConfig& cfg,
                    double ser, double delta, int chords, std::uint64_t seed) {
  const double w = spec.f3 * spec.sigma_hat_sq(cfg.sigma2) + delta * spec.c3;
  const double lo = cfg.b_min;
  double hi;
  try {
    hi = stream_upper_bound(ser, spec, cfg);
  } catch (const Error&) {
    return 0;  // no feasible segment to probe
  }
  if (!(hi > lo)) return 0;
  auto phi = [&](double b) {
    return w * stream_term(eta(b, ser, cfg.R_s, cfg.B), spec);
  };
  GaussianSampler rng(seed);
  int violations = 0;
  for (int c = 0; c < chords; ++c) {
    double x = lo + (hi - lo) * rng.uniform();
    double y = lo + (hi - lo) * rng.uniform();
    double mid = phi(0.5 * (x + y));
    double bound = 0.5 * (phi(x) + phi(y));
    if (mid > bound + 1e-9 * std::max(1.0, std::abs(bound))) ++violations;
  }
  return violations;
}

}  // namespace greenmimo
