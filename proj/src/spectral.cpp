#include "greenmimo/spectral.hpp"

#include <cmath>
#include <string>

#include "greenmimo/errors.hpp"

namespace greenmimo {

SpectralSummary spectral_functions(const Eigen::Ref<const Eigen::VectorXd>& lambda,
                                   double alpha, double tau) {
  if (!(alpha > 0.0)) fail(ErrorKind::Structural, "alpha must be > 0");
  const int n = static_cast<int>(lambda.size());
  if (n < 2)
    fail(ErrorKind::SingularConfiguration,
         "spectral functions need at least 2 streams, got " + std::to_string(n));

  SpectralSummary s;
  s.lambda = lambda;
  s.alpha = alpha;
  s.tau = tau;
  s.n = n;

  double sum_t = 0.0;
  for (int l = 0; l < n; ++l) {
    const double lam = lambda[l];
    if (lam < 0.0) fail(ErrorKind::Structural, "negative eigenvalue");
    const double t = lam / (lam + alpha);
    sum_t += t;
    s.f1 += t * t;
    s.f3 += lam / ((lam + alpha) * (lam + alpha));
  }
  s.f2 = sum_t * sum_t;

  const double one_minus_tau2 = 1.0 - tau * tau;
  s.c1 = (s.f1 + s.f2) * one_minus_tau2;
  s.c3 = (s.f2 - n * s.f1) * one_minus_tau2 / (1.0 - n);
  s.c2 = s.c3 - s.f3 * tau * tau * static_cast<double>(n) * (n + 1);
  return s;
}

double ser_feasibility_bound(double b) {
  return 2.0 * (1.0 - std::exp2(-b / 2.0));
}

double eta(double b, double p_e, double R_s, double B) {
  if (!(b >= 1.0)) fail(ErrorKind::Structural, "constellation exponent must be >= 1");
  if (!(p_e > 0.0)) fail(ErrorKind::InfeasibleSer, "SER target must be positive");
  const double bound = ser_feasibility_bound(b);
  if (p_e >= bound)
    fail(ErrorKind::InfeasibleSer,
         "SER " + std::to_string(p_e) + " is not below the 2^b-QAM bound " +
             std::to_string(bound));
  return (2.0 * R_s * (std::exp2(b) - 1.0) / (3.0 * B)) * std::log(bound / p_e);
}

namespace {

constexpr double kLn2 = 0.69314718055994530942;

}  // namespace

double eta_derivative(double b, double p_e, double R_s, double B) {
  const double a = 2.0 * R_s / (3.0 * B);
  const double u = std::exp2(b);
  const double v = std::exp2(-b / 2.0);
  const double big_l = std::log(2.0 * (1.0 - v) / p_e);
  const double dl = 0.5 * kLn2 * v / (1.0 - v);
  return a * (u * kLn2 * big_l + (u - 1.0) * dl);
}

double eta_second_derivative(double b, double p_e, double R_s, double B) {
  const double a = 2.0 * R_s / (3.0 * B);
  const double u = std::exp2(b);
  const double v = std::exp2(-b / 2.0);
  const double one_mv = 1.0 - v;
  const double big_l = std::log(2.0 * one_mv / p_e);
  const double dl = 0.5 * kLn2 * v / one_mv;
  const double d2l = -0.25 * kLn2 * kLn2 * v / (one_mv * one_mv);
  return a * (u * kLn2 * kLn2 * big_l + 2.0 * u * kLn2 * dl + (u - 1.0) * d2l);
}

}  // namespace greenmimo
