#include "greenmimo/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "greenmimo/errors.hpp"
#include "greenmimo/rng.hpp"

namespace greenmimo {

double packet_success(double p_e, double L, double b_total, int n_streams) {
  if (!(p_e >= 0.0 && p_e < 1.0)) fail(ErrorKind::Structural, "need 0 <= p_e < 1");
  if (!(b_total >= 1.0)) fail(ErrorKind::Structural, "b_total must be >= 1");
  if (n_streams < 1) fail(ErrorKind::Structural, "n_streams must be >= 1");
  return std::pow(1.0 - p_e, n_streams * L / b_total);
}

double throughput(double p_s, double b_total, double R_s, double L, double L_h) {
  return (L - L_h) / L * b_total * R_s * p_s;
}

double mean_delay_closed_form(double p_s, double b_total, double R_s, double L,
                              double r) {
  return (2.0 * b_total * R_s * L - r * L * L) /
         (2.0 * b_total * b_total * R_s * R_s * p_s - 2.0 * r * b_total * R_s * L);
}

QueueStats delay_stats(double p_s, double b_total, double R_s, double L,
                       double L_h, double r) {
  if (!(p_s <= 1.0)) fail(ErrorKind::Structural, "need p_s <= 1");
  if (!(p_s > 0.0))
    fail(ErrorKind::Instability, "packet success probability is zero");
  QueueStats q;
  q.p_s = p_s;
  q.t_p = L / (b_total * R_s);
  q.mean_service = q.t_p / p_s;
  q.second_moment = 2.0 * q.t_p * q.t_p / (p_s * p_s) - q.t_p * q.t_p / p_s;
  q.mu = b_total * R_s * p_s / L;
  if (r >= q.mu)
    fail(ErrorKind::Instability, "arrival rate " + std::to_string(r) +
                                     " >= service rate " + std::to_string(q.mu));
  q.intensity = r / q.mu;
  q.mean_queue = r * r * q.second_moment / (2.0 * (1.0 - q.intensity));
  q.mean_delay = (r > 0.0 ? q.mean_queue / r : 0.0) + q.mean_service;
  q.throughput = throughput(p_s, b_total, R_s, L, L_h);
  return q;
}

Mg1Result simulate_mg1(double r, double p_s, double t_p, std::int64_t n_packets,
                       std::uint64_t seed) {
  if (!(r > 0.0)) fail(ErrorKind::Structural, "arrival rate must be > 0");
  if (!(p_s > 0.0 && p_s <= 1.0)) fail(ErrorKind::Structural, "need 0 < p_s <= 1");
  GaussianSampler rng(mix_seed(seed, 0x6d673153ULL, 0));

  const double log_fail = std::log1p(-p_s);  // -inf when p_s == 1
  auto geometric_attempts = [&]() -> std::int64_t {
    if (p_s >= 1.0) return 1;
    // inverse CDF of the geometric distribution on {1,2,...}
    double u = rng.uniform();
    return 1 + static_cast<std::int64_t>(std::floor(std::log(u) / log_fail));
  };

  Mg1Result res;
  res.packets = n_packets;
  const std::int64_t warmup = std::min<std::int64_t>(n_packets / 10, 10000);

  // Lindley recursion over waiting times; FIFO single server.
  double wait = 0.0;
  double delay_sum = 0.0;
  std::int64_t counted = 0;
  for (std::int64_t k = 0; k < n_packets + warmup; ++k) {
    std::int64_t attempts = geometric_attempts();
    double service = static_cast<double>(attempts) * t_p;
    if (k >= warmup) {
      delay_sum += wait + service;
      ++counted;
      const std::size_t bin = static_cast<std::size_t>(attempts - 1);
      if (res.attempt_histogram.size() <= bin) res.attempt_histogram.resize(bin + 1, 0);
      ++res.attempt_histogram[bin];
    }
    double interarrival = -std::log(rng.uniform()) / r;
    wait = std::max(0.0, wait + service - interarrival);
  }
  res.packets = counted;
  res.mean_delay = delay_sum / static_cast<double>(counted);
  return res;
}

namespace {

// Regularized incomplete gamma functions (series + continued fraction).
double gamma_p_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi_square_pvalue(double chi2, int dof) {
  if (chi2 <= 0.0) return 1.0;
  const double a = 0.5 * dof;
  const double x = 0.5 * chi2;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_contfrac(a, x);
}

double geometric_fit_pvalue(const std::vector<std::int64_t>& attempt_histogram,
                            double p_s) {
  std::int64_t total = 0;
  for (auto c : attempt_histogram) total += c;
  if (total == 0) fail(ErrorKind::Structural, "empty histogram");

  // expected counts, folding the tail so each bin keeps >= 5 expected
  std::vector<double> expected;
  std::vector<double> observed;
  double tail_prob = 1.0;
  std::size_t k = 0;
  while (tail_prob * total >= 10.0 && k < attempt_histogram.size() + 64) {
    double pk = p_s * std::pow(1.0 - p_s, static_cast<double>(k));
    double ek = pk * total;
    if (ek < 5.0) break;
    expected.push_back(ek);
    observed.push_back(k < attempt_histogram.size()
                           ? static_cast<double>(attempt_histogram[k])
                           : 0.0);
    tail_prob -= pk;
    ++k;
  }
  // tail bin
  double tail_obs = 0.0;
  for (std::size_t j = k; j < attempt_histogram.size(); ++j)
    tail_obs += static_cast<double>(attempt_histogram[j]);
  expected.push_back(tail_prob * total);
  observed.push_back(tail_obs);

  double chi2 = 0.0;
  for (std::size_t j = 0; j < expected.size(); ++j) {
    double diff = observed[j] - expected[j];
    chi2 += diff * diff / expected[j];
  }
  const int dof = static_cast<int>(expected.size()) - 1;
  return chi_square_pvalue(chi2, std::max(dof, 1));
}

}  // namespace greenmimo
