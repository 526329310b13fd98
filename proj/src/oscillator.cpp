#include "qclock/oscillator.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "qclock/errors.hpp"

namespace qclock {

namespace {

constexpr double kQuadratureTol = 1e-12;

double integrate(const std::function<double(double)>& f, double a, double b) {
  if (a == b) return 0.0;
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, kQuadratureTol, &error);
  if (!std::isfinite(value) || error > 1e-9 * std::max(1.0, std::abs(value))) {
    throw QuadratureFailure(fmt::format("quadrature on [{}, {}] did not converge (error {})", a, b, error));
  }
  return value;
}

void validate_cov(const Eigen::Matrix2d& cov) {
  if (!cov.allFinite() || std::abs(cov(0, 1) - cov(1, 0)) > 1e-12) {
    throw InvalidParam("initial_cov must be finite and symmetric");
  }
  if (cov.determinant() < 0.25 - 1e-12 || cov(0, 0) <= 0.0) {
    throw InvalidParam("initial_cov violates the uncertainty relation");
  }
}

}  // namespace

void LinearMeasurementPlan::validate() const {
  if (times.empty()) throw InvalidParam("plan needs at least one measurement");
  if (times.size() != sigmas.size()) throw InvalidParam("times and sigmas must have equal length");
  for (size_t j = 0; j < times.size(); ++j) {
    if (!std::isfinite(times[j])) throw InvalidParam("times must be finite");
    if (j > 0 && !(times[j] > times[j - 1])) throw InvalidParam("times must be strictly increasing");
    if (!(sigmas[j] > 0.0) || !std::isfinite(sigmas[j])) throw InvalidParam("sigmas must be positive");
  }
  validate_cov(initial_cov);
}

Eigen::MatrixXd covariance_matrix(const LinearMeasurementPlan& plan) {
  plan.validate();
  const int n = static_cast<int>(plan.times.size());
  Eigen::MatrixXd rot(n, 2);
  for (int j = 0; j < n; ++j) rot.row(j) << std::cos(plan.times[j]), std::sin(plan.times[j]);
  Eigen::MatrixXd b = rot * plan.initial_cov * rot.transpose();
  // Column k of `kernel` carries sin(t_j - t_k) for j > k.
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double scale = 1.0 / (2.0 * plan.sigmas[k]);
    for (int j = k + 1; j < n; ++j) kernel(j, k) = std::sin(plan.times[j] - plan.times[k]) * scale;
  }
  b += kernel * kernel.transpose();
  for (int j = 0; j < n; ++j) b(j, j) += plan.sigmas[j] * plan.sigmas[j];
  return b;
}

void ForceEstimatorSpec::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidParam("tau must be positive");
  if (center_index < 2) throw InvalidParam("center_index must be >= 2");
  validate_cov(initial_cov);
}

double fd_estimator_variance(const ForceEstimatorSpec& spec, double sigma) {
  spec.validate();
  return fd_estimator_variance(spec, std::vector<double>(static_cast<size_t>(spec.center_index + 1), sigma));
}

double fd_estimator_variance(const ForceEstimatorSpec& spec, const std::vector<double>& sigmas) {
  spec.validate();
  const int count = spec.center_index + 1;
  if (static_cast<int>(sigmas.size()) != count) {
    throw InvalidParam(fmt::format("need {} sigmas, got {}", count, sigmas.size()));
  }
  LinearMeasurementPlan plan;
  plan.sigmas = sigmas;
  plan.initial_cov = spec.initial_cov;
  for (int n = 0; n < count; ++n) plan.times.push_back(n * spec.tau);
  const Eigen::MatrixXd b = covariance_matrix(plan);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(count);
  const double inv = 1.0 / (spec.tau * spec.tau);
  w(count - 3) = inv;
  w(count - 2) = 1.0 - 2.0 * inv;
  w(count - 1) = inv;
  return w.dot(b * w);
}

double fd_variance_floor(double tau) { return (2.0 / std::numbers::pi) / (tau * tau * tau); }

double fd_bias_prefactor(double tau) {
  if (std::abs(tau) < 1e-2) {
    const double t2 = tau * tau;
    return t2 / 12.0 * (1.0 - t2 / 30.0 + t2 * t2 / 1680.0);
  }
  const double s = std::sin(tau / 2.0);
  return (tau * tau - 4.0 * s * s) / (tau * tau);
}

double fd_estimator_bias(const ForceEstimatorSpec& spec) {
  spec.validate();
  if (!spec.waveform) throw InvalidParam("waveform is required");
  const auto& x = spec.waveform;
  const double t = spec.center_time();
  const double tau = spec.tau;
  const double history = integrate([&](double s) { return x(s) * std::sin(t - s); }, 0.0, t);
  const double stencil =
      integrate([&](double u) { return std::sin(tau - u) * (x(t + u) + x(t - u)); }, 0.0, tau);
  return fd_bias_prefactor(tau) * history + stencil / (tau * tau) - x(t);
}

std::pair<double, double> heisenberg_moments(double q0, double p0,
                                             const std::function<double(double)>& waveform, double t) {
  if (!waveform) throw InvalidParam("waveform is required");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidParam("t must be non-negative");
  const double q_drive = integrate([&](double s) { return waveform(s) * std::sin(t - s); }, 0.0, t);
  const double p_drive = integrate([&](double s) { return waveform(s) * std::cos(t - s); }, 0.0, t);
  return {std::cos(t) * q0 + std::sin(t) * p0 + q_drive, -std::sin(t) * q0 + std::cos(t) * p0 + p_drive};
}

}  // namespace qclock
