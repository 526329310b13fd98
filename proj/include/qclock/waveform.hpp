#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qclock/clock.hpp"
#include "qclock/measurement.hpp"
#include "qclock/rng.hpp"

namespace qclock {

// Clock measured every d^(1/2 - gamma) grid units while a white-noise
// waveform of strength noise_sigma perturbs each interval:
// delta_j = spacing + X_j with X_j ~ N(0, noise_sigma^2 * spacing).
struct WaveformExperimentConfig {
  double noise_sigma = 0.0;
  double gamma = 0.5;
  ClockParams clock;
  MeasurementParams meas;
  int n_measurements = 4;
  std::uint64_t seed = 0;

  void validate() const;
  double spacing() const;  // grid units between measurements
};

// 1 - exp(-2 pi sigma^2): the averaged per-visit damping constant for
// delta = 1 + N(0, sigma^2) as quoted for random measurement times.
double effective_damping_constant(double noise_sigma);

// E[1 - exp(-2 pi i delta)] for delta = 1 + N(0, sigma^2), which is 1 - exp(-2 pi^2 sigma^2).
double gaussian_damping_average(double noise_sigma);

struct DampingAverageEstimate {
  std::complex<double> mean = 0.0;
  double std_error = 0.0;
};

// Monte-Carlo average of 1 - exp(-2 pi i delta) over delta = 1 + N(0, sigma^2).
DampingAverageEstimate sample_damping_average(double noise_sigma, long draws, std::uint64_t seed);

// truth[i] = X_{i+2}, estimates[i] = sqrt(d) unwrap(xi_{i+2} - xi_{i+1}) - spacing.
struct WaveformTrial {
  std::vector<double> truth;
  std::vector<double> estimates;
};

// Holds the initial state and outcome sampler so repeated trials reuse them.
class WaveformRunner {
 public:
  explicit WaveformRunner(const WaveformExperimentConfig& cfg, const ThetaEvalConfig& theta_cfg = {});
  WaveformTrial trial(RngStream& rng) const;
  const WaveformExperimentConfig& config() const { return cfg_; }

 private:
  WaveformExperimentConfig cfg_;
  StateVector initial_;
  OutcomeSampler sampler_;
};

WaveformTrial run_waveform_trial(const WaveformExperimentConfig& cfg, RngStream& rng);

struct WaveformErrorStats {
  long count = 0;
  double mean_error = 0.0;       // mean of estimate - truth
  double error_stdev = 0.0;      // stdev of estimate - truth
  double mean_error_stderr = 0.0;
};

// Pools all increments of `trials` independent trials; trial i uses stream
// (cfg.seed, kWaveform, i).
WaveformErrorStats waveform_error_stats(const WaveformExperimentConfig& cfg, long trials, int threads = 1);

// Variance of sqrt(d) (xi_j - xi_{j-1}) implied by the pseudo-correlation with
// queries ((-1, j-1), (+1, j)) for a noiseless schedule, treating the
// increment as Gaussian: -d^2 ln|C| / (2 pi^2).
double increment_variance_prediction(const WaveformExperimentConfig& cfg, int j);

// d^((3/2) gamma - 1/2): smallest signal scale the estimator resolves.
double detectability_threshold(double d, double gamma);

}  // namespace qclock
