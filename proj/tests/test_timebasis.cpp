#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "qclock/clock.hpp"
#include "qclock/errors.hpp"
#include "qclock/timebasis.hpp"

using namespace qclock;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

int sign_of(int x) { return (x > 0) - (x < 0); }

}  // namespace

TEST(TransitionMatrix, ColumnsAreProbabilityVectors) {
  for (int d : {3, 11, 101}) {
    for (double delta : {0.5, 0.3, 1.7}) {
      const Eigen::MatrixXd m = transition_matrix(d, delta);
      EXPECT_GE(m.minCoeff(), -1e-12);
      for (int c = 0; c < d; ++c) EXPECT_NEAR(m.col(c).sum(), 1.0, 1e-10);
    }
  }
}

TEST(TransitionMatrix, IntegerDeltaIsCyclicShift) {
  const int d = 11;
  const Eigen::MatrixXd m = transition_matrix(d, 3.0);
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) EXPECT_NEAR(m(l, k), (l - k - 3 + 2 * d) % d == 0 ? 1.0 : 0.0, 1e-12);
  }
}

TEST(TransitionMatrix, FourierModesAreEigenvectors) {
  const int d = 101;
  const double delta = 0.3;
  const int h = (d - 1) / 2;
  const Eigen::MatrixXcd m = transition_matrix(d, delta).cast<cd>();
  for (int n = -h; n <= h; n += 7) {
    Eigen::VectorXcd v(d);
    for (int k = -h; k <= h; ++k) v(k + h) = std::polar(1.0 / std::sqrt(101.0), 2 * kPi * n * k / d);
    const cd lambda = std::polar(1.0, -2 * kPi * delta * n / d) *
                      (1.0 - (1.0 - std::polar(1.0, 2 * kPi * delta * sign_of(n))) * (std::abs(n) / 101.0));
    EXPECT_LT((m * v - lambda * v).norm(), 1e-10) << n;
  }
}

TEST(TransitionMatrix, EqualsSquaredEvolutionAmplitudes) {
  for (int d : {7, 31, 101}) {
    const double delta = 0.43;
    const Eigen::MatrixXd m = transition_matrix(d, delta);
    const Eigen::MatrixXcd u = time_basis_evolution_matrix(d, delta);
    EXPECT_LT((m - u.cwiseAbs2()).cwiseAbs().maxCoeff(), 1e-12) << d;
  }
}

TEST(TransitionMatrix, UniformPerronVector) {
  const Eigen::MatrixXd m = transition_matrix(21, 0.5);
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(21, 1.0 / 21);
  EXPECT_LT((m * u - u).norm(), 1e-12);
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  EXPECT_NEAR(es.eigenvalues().cwiseAbs().maxCoeff(), 1.0, 1e-10);
}

TEST(JumpDistribution, MatchesTransitionColumnAndEvenDimensions) {
  const int d = 31;
  const auto jump = jump_distribution(d, 0.5);
  const Eigen::MatrixXd m = transition_matrix(d, 0.5);
  for (int j = -15; j <= 15; ++j) EXPECT_NEAR(jump[j + 15], m(j + 15, 15), 1e-12);
  for (int even : {4, 64, 1024}) {
    double sum = 0.0;
    for (double p : jump_distribution(even, 0.5)) sum += p;
    EXPECT_NEAR(sum, 1.0, 1e-12) << even;
  }
  const auto shift = jump_distribution(8, 2.0);
  EXPECT_EQ(shift[2 + 4], 1.0);
}

TEST(AnalyticMoment, TrivialCases) {
  EXPECT_NEAR(std::abs(analytic_moment(11, 0.37, 2, {{0, 3}}) - 1.0), 0.0, 1e-15);
  const int d = 21, k0 = 3, m = 2, idx = 5;
  const double delta = 2.0;
  const cd v = analytic_moment(d, delta, k0, {{m, idx}});
  EXPECT_NEAR(std::abs(v), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(v - std::polar(1.0, 2 * kPi * m * (k0 + idx * delta) / d)), 0.0, 1e-12);
  EXPECT_THROW(analytic_moment(11, 0.5, 0, {{6, 2}}), InvalidQuery);
}

TEST(AnalyticMoment, MatchesExactMarginalPropagation) {
  const int d = 21;
  const double delta = 0.3;
  const int k0 = 2;
  const int h = 10;
  const Eigen::MatrixXd m = transition_matrix(d, delta);
  // <exp(2 pi i (m1 k_{I1} + m2 k_{I2}) / d)> by propagating a weighted vector.
  const int m1 = 1, i1 = 3, m2 = -2, i2 = 7;
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(d);
  w(k0 + h) = 1.0;
  for (int step = 1; step <= i2; ++step) {
    w = m.cast<cd>() * w;
    const int mult = step == i1 ? m1 : step == i2 ? m2 : 0;
    for (int k = -h; k <= h; ++k) w(k + h) *= std::polar(1.0, 2 * kPi * mult * k / d);
  }
  EXPECT_LT(std::abs(w.sum() - analytic_moment(d, delta, k0, {{m1, i1}, {m2, i2}})), 1e-13);
}

TEST(AnalyticMoment, MatchesSampledChains) {
  const int d = 101;
  const TimeBasisChainParams params{d, 0.5, 0};
  const cd exact = analytic_moment(d, 0.5, 0, {{1, 5}, {-2, 9}});
  const long n = 200000;
  long double re = 0, im = 0, re2 = 0, im2 = 0;
  const TimeBasisChainSampler sampler(d, 0.5);
  for (long c = 0; c < n; ++c) {
    RngStream rng({17, experiment_ids::kTimeBasisChain, static_cast<std::uint64_t>(c)});
    int label = 0, k5 = 0;
    for (int step = 1; step <= 9; ++step) {
      label = sampler.step(label, rng);
      if (step == 5) k5 = label;
    }
    const cd z = std::polar(1.0, 2 * kPi * (k5 - 2 * label) / d);
    re += z.real();
    im += z.imag();
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
  }
  const double mre = static_cast<double>(re / n), mim = static_cast<double>(im / n);
  const double se = std::sqrt(static_cast<double>((re2 / n - mre * mre + im2 / n - mim * mim) / n));
  EXPECT_LT(std::abs(cd(mre, mim) - exact), 4 * se) << exact;
}

TEST(SampleChain, IntegerDeltaIsDeterministic) {
  RngStream rng({1, 0, 0});
  const auto path = sample_chain({11, 2.0, -4}, 8, rng);
  int expected = -4;
  for (int label : path) {
    expected += 2;
    if (expected > 5) expected -= 11;
    EXPECT_EQ(label, expected);
  }
}

TEST(SampleChain, MarginalMixesOnLinearTimescale) {
  const int d = 301;
  const int h = 150;
  const Eigen::MatrixXd m = transition_matrix(d, 0.5);
  auto tv_after = [&](int steps) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
    p(h) = 1.0;
    for (int i = 0; i < steps; ++i) p = m * p;
    return 0.5 * (p.array() - 1.0 / d).abs().sum();
  };
  // Upper bound (1/2) sqrt(sum_{s != 0} |lambda_s|^(2 n)) from the Fourier modes of the walk.
  auto fourier_bound = [&](int steps) {
    double acc = 0.0;
    for (int s = -h; s <= h; ++s) {
      if (s == 0) continue;
      const double lambda = std::abs(1.0 - 2.0 * std::abs(s) / static_cast<double>(d));
      acc += std::pow(lambda, 2.0 * steps);
    }
    return 0.5 * std::sqrt(acc);
  };
  double previous = 1.0;
  for (int steps : {10, 53, 150, 301, 602}) {
    const double tv = tv_after(steps);
    EXPECT_LE(tv, fourier_bound(steps) + 1e-12) << steps;
    EXPECT_LT(tv, previous) << steps;
    previous = tv;
  }
  EXPECT_GT(tv_after(53), 0.4);
  EXPECT_LT(tv_after(2 * d), 0.05);
}

TEST(LimitCf, ClosedForms) {
  EXPECT_EQ(cauchy_limit_cf({0.0, 0.0}, {0.5, 1.0}), cd(1.0, 0.0));
  EXPECT_EQ(uniform_limit_cf({0.0}, {0.3}), cd(1.0, 0.0));
  const double theta = -1.5, t = 0.7;
  EXPECT_LT(std::abs(cauchy_limit_cf({theta}, {t}) -
                     std::polar(std::exp(-2 * std::abs(theta) * t), 2 * kPi * theta * t)),
            1e-15);
  EXPECT_LT(std::abs(uniform_limit_cf({1.0}, {t}) - std::polar(1.0, 2 * kPi * t)), 1e-15);
  const cd two = cauchy_limit_cf({1.0, -0.5}, {0.2, 0.6});
  const cd expected = std::polar(std::exp(-2 * (0.5 * 0.2 + 0.5 * 0.4)), 2 * kPi * (0.2 - 0.3));
  EXPECT_LT(std::abs(two - expected), 1e-15);
  EXPECT_THROW(cauchy_limit_cf({1.0, 1.0}, {0.5, 0.5}), InvalidParam);
}

TEST(ScaledProcess, ZeroTimeAndThreadIndependence) {
  const auto a = scaled_process_cf(2, {1.0, -2.0}, {0.0, 0.5}, 3000, 5, 1);
  const auto b = scaled_process_cf(2, {1.0, -2.0}, {0.0, 0.5}, 3000, 5, 4);
  EXPECT_EQ(a[0][0].value, cd(1.0, 0.0));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) EXPECT_EQ(a[i][j].value, b[i][j].value);
  }
}
