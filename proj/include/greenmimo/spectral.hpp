#pragma once

#include <Eigen/Dense>

namespace greenmimo {

/// Scalar functionals of the regularized eigenvalue spectrum together with
/// the constants of the closed-form power model. With t_l = lambda_l /
/// (lambda_l + alpha) and n the stream count:
///
///   f1 = sum t_l^2,   f2 = (sum t_l)^2,   f3 = sum lambda_l/(lambda_l+alpha)^2
///   c1 = (f1 + f2)(1 - tau^2)
///   c3 = (f2 - n f1)(1 - tau^2)/(1 - n)
///   c2 = c3 - f3 tau^2 n(n+1)
///
/// f2 >= f1 always (nonnegative t), and c3 >= 0 by Cauchy-Schwarz.
struct SpectralSummary {
  Eigen::VectorXd lambda;
  double alpha = 0.0;
  double tau = 0.0;
  int n = 0;
  double f1 = 0.0, f2 = 0.0, f3 = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;

  /// n(n+1)*sigma2, the effective noise scale of the SINR denominator.
  double sigma_hat_sq(double sigma2) const {
    return static_cast<double>(n) * (n + 1) * sigma2;
  }
};

/// Computes SpectralSummary from eigenvalues, regularizer and CSI quality.
/// Requires alpha > 0, lambda >= 0 and n >= 2; n = 1 raises
/// Error{SingularConfiguration} because the interference term divides by 1-n.
SpectralSummary spectral_functions(const Eigen::Ref<const Eigen::VectorXd>& lambda,
                                   double alpha, double tau);

/// Largest SER reachable by 2^b-QAM under the Chernoff bound: 2(1-2^{-b/2}).
double ser_feasibility_bound(double b);

/// Minimum SINR for 2^b-QAM at symbol error rate p_e:
///   eta(b) = (2 R_s (2^b - 1) / (3 B)) * ln(2(1 - 2^{-b/2}) / p_e).
/// Accepts real b >= 1 (the optimizer relaxes the integer constraint).
/// Throws Error{InfeasibleSer} when p_e >= 2(1-2^{-b/2}).
double eta(double b, double p_e, double R_s, double B);

/// d eta / d b and d^2 eta / d b^2 for the same arguments.
double eta_derivative(double b, double p_e, double R_s, double B);
double eta_second_derivative(double b, double p_e, double R_s, double B);

}  // namespace greenmimo
