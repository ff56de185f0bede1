#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "greenmimo/channel.hpp"
#include "greenmimo/errors.hpp"
#include "greenmimo/rng.hpp"

using namespace greenmimo;

namespace {

SystemConfig small_cfg() {
  SystemConfig cfg;
  cfg.K = 3;
  cfg.N_t = 2;
  cfg.N_r = 4;
  cfg.tau = 0.3;
  return cfg;
}

}  // namespace

TEST_CASE("composition identity holds exactly") {
  SystemConfig cfg = small_cfg();
  for (std::uint64_t seed : {1ULL, 7ULL, 42ULL}) {
    ChannelRealization real = sample_channel(cfg, seed);
    Eigen::MatrixXcd expected =
        std::sqrt(1.0 - cfg.tau * cfg.tau) * real.H_hat + cfg.tau * real.Omega;
    CHECK((real.H - expected).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("tau extremes") {
  SystemConfig cfg = small_cfg();
  cfg.tau = 0.0;
  ChannelRealization perfect = sample_channel(cfg, 5);
  CHECK((perfect.H - perfect.H_hat).cwiseAbs().maxCoeff() == 0.0);

  cfg.tau = 1.0;
  ChannelRealization blind = sample_channel(cfg, 5);
  CHECK((blind.H - blind.Omega).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identical seed reproduces bit for bit") {
  SystemConfig cfg = small_cfg();
  ChannelRealization a = sample_channel(cfg, 1234);
  ChannelRealization b = sample_channel(cfg, 1234);
  CHECK((a.H_hat - b.H_hat).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.Omega - b.Omega).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.eigenvectors - b.eigenvectors).cwiseAbs().maxCoeff() == 0.0);

  ChannelRealization c = sample_channel(cfg, 1235);
  CHECK((a.H_hat - c.H_hat).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("rank-deficient Gram spectrum of a 4x20 channel") {
  SystemConfig cfg;
  cfg.N_r = 4;
  cfg.K = 10;
  cfg.N_t = 2;
  ChannelRealization real = sample_channel(cfg, 99);
  REQUIRE(real.eigenvalues.size() == 20);
  int near_zero = 0;
  for (Eigen::Index i = 0; i < 20; ++i) {
    CHECK(real.eigenvalues[i] >= 0.0);
    if (real.eigenvalues[i] < 1e-9) ++near_zero;
  }
  CHECK(near_zero == 16);
}

TEST_CASE("eigendecomposition invariants") {
  SystemConfig cfg = small_cfg();
  ChannelRealization real = sample_channel(cfg, 17);
  const int n = cfg.stream_count();
  Eigen::MatrixXcd qhq = real.eigenvectors.adjoint() * real.eigenvectors;
  CHECK((qhq - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);

  Eigen::MatrixXcd gram = real.H_hat.adjoint() * real.H_hat;
  Eigen::MatrixXcd rebuilt = real.eigenvectors *
                             real.eigenvalues.asDiagonal() *
                             real.eigenvectors.adjoint();
  CHECK((gram - rebuilt).norm() / gram.norm() < 1e-8);
}

TEST_CASE("entry moments over many samples") {
  SystemConfig cfg;
  cfg.K = 5;
  cfg.N_t = 2;
  cfg.N_r = 10;  // 100 entries per draw
  const int trials = 1200;  // 120k entries
  double sum_re = 0.0, sum_abs2 = 0.0;
  std::int64_t n = 0;
  for (int t = 0; t < trials; ++t) {
    ChannelRealization real = sample_channel(cfg, 1000 + t);
    sum_re += real.H_hat.real().sum() + real.H_hat.imag().sum();
    sum_abs2 += real.H_hat.cwiseAbs2().sum();
    n += real.H_hat.size();
  }
  const double n_parts = 2.0 * n;
  const double mean_part = sum_re / n_parts;          // each part has var 1/2
  const double se_mean = std::sqrt(0.5 / n_parts);
  CHECK(std::abs(mean_part) < 3.0 * se_mean);
  const double mean_abs2 = sum_abs2 / n;              // E|h|^2 = 1, var = 1
  const double se_abs2 = std::sqrt(1.0 / n);
  CHECK(std::abs(mean_abs2 - 1.0) < 3.0 * se_abs2);
}

TEST_CASE("frobenius norm dominates every column norm strictly") {
  SystemConfig cfg = small_cfg();
  for (int t = 0; t < 1000; ++t) {
    ChannelRealization real = sample_channel(cfg, 40000 + t);
    for (int i = 0; i < cfg.K; ++i) {
      Eigen::MatrixXcd block = real.user_block(i, cfg.N_t);
      CHECK(frobenius_norm_sq(block) > max_column_norm_sq(block));
    }
  }
}

TEST_CASE("received symbols") {
  SystemConfig cfg = small_cfg();
  ChannelRealization real = sample_channel(cfg, 3);
  const int n = cfg.stream_count();
  Eigen::VectorXcd symbols = Eigen::VectorXcd::Ones(n);

  SUBCASE("zero powers, zero noise give the zero vector") {
    Eigen::VectorXcd y = simulate_received_symbols(
        real, Eigen::VectorXd::Zero(n), symbols, 0.0, 11);
    CHECK(y.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("zero powers leave exactly the noise draw") {
    Eigen::VectorXcd y = simulate_received_symbols(
        real, Eigen::VectorXd::Zero(n), symbols, 2.0, 11);
    Eigen::VectorXcd y2 = simulate_received_symbols(
        real, Eigen::VectorXd::Zero(n), symbols, 2.0, 11);
    CHECK(y.cwiseAbs().minCoeff() > 0.0);
    CHECK((y - y2).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("scalar case y = 2") {
    SystemConfig one;
    one.K = 1;
    one.N_t = 1;
    one.N_r = 1;
    one.tau = 0.0;
    ChannelRealization scalar = sample_channel(one, 1);
    scalar.H(0, 0) = 1.0;
    Eigen::VectorXd p(1);
    p << 4.0;
    Eigen::VectorXcd x(1);
    x << 1.0;
    Eigen::VectorXcd y = simulate_received_symbols(scalar, p, x, 0.0, 0);
    CHECK(std::abs(y[0] - std::complex<double>(2.0, 0.0)) < 1e-15);
  }

  SUBCASE("dimension mismatch is a structural error") {
    Eigen::VectorXd short_p = Eigen::VectorXd::Zero(n - 1);
    CHECK_THROWS_AS(simulate_received_symbols(real, short_p, symbols, 1.0, 0),
                    Error);
  }
}

TEST_CASE("haar samples are unitary") {
  std::mt19937_64 engine(7);
  for (int n : {2, 4, 8}) {
    Eigen::MatrixXcd q = sample_haar_unitary(n, engine);
    Eigen::MatrixXcd qhq = q.adjoint() * q;
    CHECK((qhq - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("seed mixing separates streams") {
  CHECK(mix_seed(1, 0, 0) != mix_seed(1, 0, 1));
  CHECK(mix_seed(1, 0, 0) != mix_seed(1, 1, 0));
  CHECK(mix_seed(1, 2, 3) == mix_seed(1, 2, 3));
  CHECK(mix_seed(2, 2, 3) != mix_seed(1, 2, 3));
}
