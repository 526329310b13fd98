#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qclock {

// Position measurements of a unit harmonic oscillator (omega = m = hbar = 1)
// at `times` with imprecision `sigmas`. initial_cov holds the symmetrized
// (q, p) second moments of the Gaussian initial state.
struct LinearMeasurementPlan {
  std::vector<double> times;
  std::vector<double> sigmas;
  Eigen::Matrix2d initial_cov = 0.5 * Eigen::Matrix2d::Identity();

  void validate() const;
};

// B_jl = B^init_jl + delta_jl sigma_j^2 + sum_{n < min(j, l)} c_jn c_ln / (4 sigma_n^2),
// c_jl = sin(t_j - t_l). The n = min(j, l) term vanishes since c_jj = 0.
Eigen::MatrixXd covariance_matrix(const LinearMeasurementPlan& plan);

// Force estimate q_j + (q_{j+1} + q_{j-1} - 2 q_j) / tau^2 from measurements
// at t_n = (n - 1) tau, n = 1 .. center_index + 1, centred on t = (center_index - 1) tau.
struct ForceEstimatorSpec {
  double tau = 0.1;
  int center_index = 2;
  std::function<double(double)> waveform;
  Eigen::Matrix2d initial_cov = 0.5 * Eigen::Matrix2d::Identity();

  void validate() const;
  double center_time() const { return (center_index - 1) * tau; }
};

// Variance of the estimator with the same imprecision sigma for every measurement.
double fd_estimator_variance(const ForceEstimatorSpec& spec, double sigma);
// Per-measurement imprecisions; `sigmas` needs center_index + 1 entries.
double fd_estimator_variance(const ForceEstimatorSpec& spec, const std::vector<double>& sigmas);

// Lower bound (2/pi) / tau^3 on the estimator variance.
double fd_variance_floor(double tau);

// (2 cos tau - 2 + tau^2) / tau^2, evaluated without cancellation.
double fd_bias_prefactor(double tau);

// Expected estimate minus x(t) for a zero-mean initial state:
//   prefactor * int_0^t x(s) sin(t - s) ds
//   + tau^-2 int_0^tau sin(tau - u) (x(t + u) + x(t - u)) du - x(t).
double fd_estimator_bias(const ForceEstimatorSpec& spec);

// Means (q(t), p(t)) under H = (q^2 + p^2)/2 - x(t) q started from (q0, p0).
std::pair<double, double> heisenberg_moments(double q0, double p0,
                                             const std::function<double(double)>& waveform, double t);

}  // namespace qclock
