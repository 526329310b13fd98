#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <gtest/gtest.h>

#include "qclock/errors.hpp"
#include "qclock/experiments.hpp"
#include "qclock/oscillator.hpp"

using namespace qclock;

namespace {

constexpr double kPi = std::numbers::pi;

ForceEstimatorSpec spec_for(double tau, int center_index = 2) {
  ForceEstimatorSpec spec;
  spec.tau = tau;
  spec.center_index = center_index;
  return spec;
}

double min_variance(double tau) {
  const ForceEstimatorSpec spec = spec_for(tau);
  auto f = [&](double log_sigma) { return fd_estimator_variance(spec, std::exp(log_sigma)); };
  const auto best = boost::math::tools::brent_find_minima(f, std::log(tau) - 8.0, std::log(tau) + 4.0, 40);
  return best.second;
}

double q_mean(const std::function<double(double)>& x, double t) { return heisenberg_moments(0.0, 0.0, x, t).first; }

}  // namespace

TEST(CovarianceMatrix, SingleMeasurement) {
  LinearMeasurementPlan plan{{0.7}, {0.3}};
  const Eigen::MatrixXd b = covariance_matrix(plan);
  ASSERT_EQ(b.rows(), 1);
  EXPECT_NEAR(b(0, 0), 0.5 + 0.09, 1e-15);
}

TEST(CovarianceMatrix, QuarterPeriodBackaction) {
  LinearMeasurementPlan plan{{0.0, kPi / 2}, {1.0, 1.0}};
  const Eigen::MatrixXd b = covariance_matrix(plan);
  EXPECT_NEAR(b(0, 0), 1.5, 1e-15);
  EXPECT_NEAR(b(1, 1), 1.75, 1e-15);
  EXPECT_NEAR(b(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(b(1, 0), 0.0, 1e-15);
}

TEST(CovarianceMatrix, StroboscopicTimesHaveNoBackaction) {
  const double sigma = 0.05;
  LinearMeasurementPlan plan{{0.0, kPi, 2 * kPi, 3 * kPi}, std::vector<double>(4, sigma)};
  const Eigen::MatrixXd b = covariance_matrix(plan);
  for (int j = 0; j < 4; ++j) {
    for (int l = 0; l < 4; ++l) {
      const double expected = 0.5 * std::cos(plan.times[j] - plan.times[l]) + (j == l ? sigma * sigma : 0.0);
      EXPECT_NEAR(b(j, l), expected, 1e-14);
    }
  }
}

TEST(CovarianceMatrix, SymmetricPositiveDefinite) {
  LinearMeasurementPlan plan{{0.0, 0.3, 0.5, 1.9, 2.0, 4.4}, {0.2, 1.3, 0.01, 0.7, 2.0, 0.4}};
  plan.initial_cov << 2.0, 0.3, 0.3, 0.25;
  const Eigen::MatrixXd b = covariance_matrix(plan);
  EXPECT_LT((b - b.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(CovarianceMatrix, RejectsBadPlans) {
  EXPECT_THROW(covariance_matrix({{}, {}}), InvalidParam);
  EXPECT_THROW(covariance_matrix({{0.0, 1.0}, {0.1}}), InvalidParam);
  EXPECT_THROW(covariance_matrix({{1.0, 0.5}, {0.1, 0.1}}), InvalidParam);
  EXPECT_THROW(covariance_matrix({{0.0}, {0.0}}), InvalidParam);
  LinearMeasurementPlan squeezed{{0.0}, {0.1}};
  squeezed.initial_cov << 0.1, 0.0, 0.0, 0.1;
  EXPECT_THROW(covariance_matrix(squeezed), InvalidParam);
}

TEST(ForceEstimator, VarianceMatchesWeightedCovariance) {
  const double tau = 0.3, sigma = 0.2;
  LinearMeasurementPlan plan{{0.0, tau, 2 * tau}, {sigma, sigma, sigma}};
  const Eigen::MatrixXd b = covariance_matrix(plan);
  Eigen::Vector3d w(1 / (tau * tau), 1 - 2 / (tau * tau), 1 / (tau * tau));
  EXPECT_NEAR(fd_estimator_variance(spec_for(tau), sigma), w.dot(b * w), 1e-9);
}

TEST(ForceEstimator, VarianceNeverBelowFloor) {
  for (double tau : {0.02, 0.05, 0.1, 0.3, 0.7, 1.0, 1.4}) {
    for (int i = 0; i <= 80; ++i) {
      const double sigma = std::sqrt(tau) * std::pow(10.0, -3.0 + 6.0 * i / 80.0);
      EXPECT_GE(fd_estimator_variance(spec_for(tau), sigma), fd_variance_floor(tau)) << tau << " " << sigma;
    }
    EXPECT_GE(min_variance(tau), fd_variance_floor(tau)) << tau;
  }
}

TEST(ForceEstimator, MinimalVarianceScalesAsInverseCube) {
  std::vector<std::pair<double, double>> points;
  for (int i = 0; i <= 8; ++i) {
    const double tau = 0.02 * std::pow(25.0, i / 8.0);
    points.emplace_back(tau, min_variance(tau));
  }
  EXPECT_NEAR(fit_loglog_slope(points).slope, -3.0, 0.1);
}

TEST(ForceEstimator, SmallTauMinimumApproachesRootSix) {
  const double tau = 0.01;
  EXPECT_NEAR(min_variance(tau) * tau * tau * tau, std::sqrt(6.0), 0.01);
}

TEST(ForceEstimator, RejectsBadSpecs) {
  EXPECT_THROW(fd_estimator_variance(spec_for(0.0), 0.1), InvalidParam);
  EXPECT_THROW(fd_estimator_variance(spec_for(0.1, 1), 0.1), InvalidParam);
  EXPECT_THROW(fd_estimator_variance(spec_for(0.1), std::vector<double>{0.1, 0.1}), InvalidParam);
  EXPECT_THROW(fd_estimator_bias(spec_for(0.1)), InvalidParam);
}

TEST(BiasPrefactor, SeriesAndClosedFormAgree) {
  for (double tau : {1e-4, 1e-3, 5e-3}) EXPECT_NEAR(fd_bias_prefactor(tau) / (tau * tau / 12.0), 1.0, 1e-5);
  const double tau = 0.01;
  const double direct = (2 * std::cos(tau) - 2 + tau * tau) / (tau * tau);
  EXPECT_NEAR(fd_bias_prefactor(tau), direct, 1e-12);
  EXPECT_NEAR(fd_bias_prefactor(0.0099999), fd_bias_prefactor(0.01), 1e-9);
  EXPECT_NEAR(fd_bias_prefactor(0.1) / (0.01 / 12.0), 1.0, 1e-2);
}

TEST(EstimatorBias, VanishesWithoutSignal) {
  ForceEstimatorSpec spec = spec_for(0.2, 5);
  spec.waveform = [](double) { return 0.0; };
  EXPECT_EQ(fd_estimator_bias(spec), 0.0);
}

TEST(EstimatorBias, MatchesDirectStencilOfMeanTrajectory) {
  const std::function<double(double)> x = [](double s) { return std::cos(0.3 * s) + 0.2 * s; };
  for (int center : {2, 4}) {
    ForceEstimatorSpec spec = spec_for(0.25, center);
    spec.waveform = x;
    const double t = spec.center_time();
    const double q = q_mean(x, t);
    const double direct = q + (q_mean(x, t + 0.25) + q_mean(x, t - 0.25) - 2 * q) / (0.25 * 0.25) - x(t);
    EXPECT_NEAR(fd_estimator_bias(spec), direct, 1e-8) << center;
  }
}

TEST(EstimatorBias, SecondOrderInSpacing) {
  std::vector<std::pair<double, double>> points;
  for (int k : {10, 20, 40, 80}) {
    ForceEstimatorSpec spec = spec_for(2.0 / k, k + 1);
    spec.waveform = [](double s) { return std::cos(0.3 * s); };
    ASSERT_NEAR(spec.center_time(), 2.0, 1e-12);
    points.emplace_back(spec.tau, std::abs(fd_estimator_bias(spec)));
  }
  EXPECT_GE(fit_loglog_slope(points).slope, 1.9);
}

TEST(HeisenbergMoments, ConstantForce) {
  const double f = 0.7, q0 = 0.3, p0 = -1.1;
  for (double t : {0.0, 0.4, 2.5, 7.0}) {
    const auto [q, p] = heisenberg_moments(q0, p0, [f](double) { return f; }, t);
    EXPECT_NEAR(q, q0 * std::cos(t) + p0 * std::sin(t) + f * (1 - std::cos(t)), 1e-9);
    EXPECT_NEAR(p, -q0 * std::sin(t) + p0 * std::cos(t) + f * std::sin(t), 1e-9);
  }
}

TEST(HeisenbergMoments, ResonantDrive) {
  for (double t : {0.5, 3.0, 10.0}) {
    const auto [q, p] = heisenberg_moments(0.0, 0.0, [](double s) { return std::sin(s); }, t);
    EXPECT_NEAR(q, (std::sin(t) - t * std::cos(t)) / 2, 1e-9);
    EXPECT_NEAR(p, t * std::sin(t) / 2, 1e-9);
  }
  EXPECT_THROW(heisenberg_moments(0, 0, [](double) { return 0.0; }, -1.0), InvalidParam);
}
