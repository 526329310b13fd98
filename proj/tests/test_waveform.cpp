#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "qclock/errors.hpp"
#include "qclock/waveform.hpp"

using namespace qclock;

namespace {

constexpr double kPi = std::numbers::pi;

WaveformExperimentConfig base_config(double noise_sigma) {
  WaveformExperimentConfig cfg;
  cfg.noise_sigma = noise_sigma;
  cfg.gamma = 0.5;
  cfg.clock = {101, 1.0, 0};
  cfg.meas.sigma_m_sq = 0.5;
  cfg.n_measurements = 4;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST(DampingConstant, Limits) {
  EXPECT_EQ(effective_damping_constant(0.0), 0.0);
  EXPECT_NEAR(effective_damping_constant(1e-4) / (2 * kPi * 1e-8), 1.0, 1e-6);
  EXPECT_NEAR(effective_damping_constant(10.0), 1.0, 1e-12);
  EXPECT_EQ(gaussian_damping_average(0.0), 0.0);
  EXPECT_NEAR(gaussian_damping_average(1e-4) / (2 * kPi * kPi * 1e-8), 1.0, 1e-6);
  EXPECT_THROW(effective_damping_constant(-0.1), InvalidParam);
}

TEST(DampingConstant, GaussianAverageMatchesSampling) {
  for (double sigma : {0.05, 0.3, 0.8}) {
    const auto mc = sample_damping_average(sigma, 200000, 3);
    EXPECT_LT(std::abs(mc.mean - std::complex<double>(gaussian_damping_average(sigma), 0.0)),
              4 * mc.std_error + 1e-12)
        << sigma;
  }
  const auto exact = sample_damping_average(0.0, 100, 3);
  EXPECT_NEAR(std::abs(exact.mean), 0.0, 1e-12);
}

TEST(WaveformConfig, SpacingAndValidation) {
  WaveformExperimentConfig cfg = base_config(0.0);
  EXPECT_NEAR(cfg.spacing(), 1.0, 1e-15);
  cfg.gamma = 0.0;
  EXPECT_NEAR(cfg.spacing(), std::sqrt(101.0), 1e-12);
  cfg.gamma = 0.7;
  EXPECT_THROW(cfg.validate(), InvalidParam);
  cfg = base_config(-1.0);
  EXPECT_THROW(cfg.validate(), InvalidParam);
  cfg = base_config(0.1);
  cfg.n_measurements = 1;
  EXPECT_THROW(cfg.validate(), InvalidParam);
  cfg = base_config(0.1);
  cfg.meas.sigma_m_sq = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidParam);
}

TEST(WaveformTrial, ShapesAndNoiselessTruth) {
  const WaveformExperimentConfig cfg = base_config(0.0);
  RngStream rng({1, experiment_ids::kWaveform, 0});
  const WaveformTrial trial = run_waveform_trial(cfg, rng);
  ASSERT_EQ(trial.truth.size(), 3u);
  ASSERT_EQ(trial.estimates.size(), 3u);
  for (double x : trial.truth) EXPECT_EQ(x, 0.0);
}

TEST(WaveformTrial, EstimatorIsUnbiased) {
  for (double noise : {0.0, 0.4}) {
    const auto stats = waveform_error_stats(base_config(noise), 3000, 1);
    EXPECT_EQ(stats.count, 9000);
    EXPECT_LT(std::abs(stats.mean_error), 4 * stats.mean_error_stderr) << noise;
  }
}

TEST(WaveformTrial, ThreadCountDoesNotChangeResults) {
  const auto a = waveform_error_stats(base_config(0.2), 300, 1);
  const auto b = waveform_error_stats(base_config(0.2), 300, 3);
  EXPECT_EQ(a.mean_error, b.mean_error);
  EXPECT_EQ(a.error_stdev, b.error_stdev);
}

TEST(WaveformTrial, IncrementVarianceMatchesPseudoCorrelation) {
  const WaveformExperimentConfig cfg = base_config(0.0);
  const WaveformRunner runner(cfg);
  const int trials = 4000;
  for (int j : {2, 4}) {
    long double sum = 0, sum_sq = 0;
    for (int i = 0; i < trials; ++i) {
      RngStream rng({29, experiment_ids::kWaveform, static_cast<std::uint64_t>(i)});
      const double e = runner.trial(rng).estimates[static_cast<size_t>(j - 2)];
      sum += e;
      sum_sq += e * e;
    }
    const double mean = static_cast<double>(sum / trials);
    const double var = static_cast<double>(sum_sq / trials) - mean * mean;
    EXPECT_NEAR(var / increment_variance_prediction(cfg, j), 1.0, 0.1) << j;
  }
  EXPECT_THROW(increment_variance_prediction(cfg, 1), IndexOutOfRange);
  EXPECT_THROW(increment_variance_prediction(cfg, 5), IndexOutOfRange);
}

TEST(Detectability, ThresholdExponent) {
  EXPECT_NEAR(detectability_threshold(1e4, 0.5), 10.0, 1e-12);
  EXPECT_NEAR(detectability_threshold(1e4, 1.0 / 3.0), 1.0, 1e-12);
  EXPECT_NEAR(detectability_threshold(1e4, 0.0), 0.01, 1e-15);
  EXPECT_THROW(detectability_threshold(0.0, 0.5), InvalidParam);
}
