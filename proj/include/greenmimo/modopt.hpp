#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "greenmimo/config.hpp"
#include "greenmimo/mmse.hpp"
#include "greenmimo/spectral.hpp"

namespace greenmimo {

/// Iteration record of the fractional-programming solve.
struct DinkelbachTrace {
  std::vector<double> deltas;  ///< delta_k sequence (watts)
  int iterations = 0;
  bool converged = false;
  double final_f = 0.0;        ///< residual f(delta) at termination
  int convexity_warnings = 0;  ///< midpoint-test violations seen by the probe
};

/// One delay class: a (possibly fractional) number of users sharing an SER
/// target. Fractional weights let the mode-crossover equation be evaluated
/// between achievable operating points.
struct SerClass {
  double users = 0.0;
  double ser = 0.0;
};

/// One allocation row per class; users of a class are interchangeable.
using ClassRows = std::vector<Eigen::VectorXd>;

/// Class-weighted numerator/denominator of the total-power ratio:
///   Phi = sum_c users_c * sum_j sigma_hat^2 f3 / (c2 + c1/eta(b_cj))
///   Psi = 1 - c3 sum_c users_c * sum_j 1 / (c2 + c1/eta(b_cj)).
/// Psi <= 0 raises Error{Infeasible}.
std::pair<double, double> objective_parts_by_class(
    const ClassRows& rows, const std::vector<SerClass>& classes,
    const SpectralSummary& spec, const SystemConfig& cfg);

/// Fixed-point total power Phi/Psi for class rows.
double total_power_by_class(const ClassRows& rows,
                            const std::vector<SerClass>& classes,
                            const SpectralSummary& spec,
                            const SystemConfig& cfg);

/// Dinkelbach iteration over class rows (see dinkelbach below).
std::pair<ClassRows, DinkelbachTrace> dinkelbach_by_class(
    const std::vector<SerClass>& classes, const SpectralSummary& spec,
    const SystemConfig& cfg, double tol = 1e-8, int max_iter = 100);

/// Integer rounding of class rows preserving row sums and the floor; ties
/// resolved by the resulting total power, then balance.
ClassRows round_class_rows(const ClassRows& rows,
                           const std::vector<SerClass>& classes,
                           const SpectralSummary& spec, const SystemConfig& cfg);

/// Groups users into classes by SER, preserving first-occurrence order.
std::vector<SerClass> group_users_by_ser(const std::vector<double>& per_user_ser);

/// Numerator and denominator of the total-power ratio for a per-user
/// allocation: P = Phi/Psi when Psi > 0.
std::pair<double, double> objective_parts(const ModulationAllocation& alloc,
                                          const SpectralSummary& spec,
                                          const SystemConfig& cfg,
                                          const std::vector<double>& per_user_ser);

/// Minimizes Phi(b) - delta*Psi(b) subject to b_ij >= b_min and
/// sum_j b_ij = b_total, independently per user. Solved by bisection on the
/// equality multiplier nu with per-stream stationarity inversion and
/// projection onto the lower bound; coordinates whose per-stream power
/// denominator would vanish are capped away from the singularity.
ModulationAllocation inner_solve(double delta, const SpectralSummary& spec,
                                 const SystemConfig& cfg,
                                 const std::vector<double>& per_user_ser);

/// Dinkelbach iteration for min Phi/Psi. Starts from the equal split,
/// updates delta_{k+1} = Phi(b_{k+1})/Psi(b_{k+1}) and stops when
/// |f(delta_k)| <= tol*max(1, delta_k). Returns the best iterate; its total
/// power never exceeds the equal split's.
std::pair<ModulationAllocation, DinkelbachTrace> dinkelbach(
    const SpectralSummary& spec, const SystemConfig& cfg,
    const std::vector<double>& per_user_ser, double tol = 1e-8,
    int max_iter = 100);

/// Rounds a real allocation to integers, per user, preserving row sums and
/// the b_min floor. Candidates are floor/ceil per coordinate; the smallest
/// total deviation wins, ties are decided by evaluating power_of (when
/// given) and then by balance.
ModulationAllocation round_allocation(
    const ModulationAllocation& b_star,
    const std::function<double(const ModulationAllocation&)>& power_of = {});

/// b_ij = b_total / N_t for every stream; requires divisibility.
ModulationAllocation equal_rate_baseline(const SystemConfig& cfg);

/// Midpoint convexity test of the per-stream objective over random chords.
/// Returns the number of violations (0 expected); a positive count means the
/// convex-programming assumptions do not hold on this channel.
int probe_convexity(const SpectralSummary& spec, const SystemConfig& cfg,
                    double ser, double delta, int chords, std::uint64_t seed);

}  // namespace greenmimo
