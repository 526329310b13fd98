#include "qclock/theta.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "qclock/errors.hpp"

namespace qclock {

namespace {

constexpr double kPi = std::numbers::pi;

void check_inputs(std::complex<double> z, double tau, const ThetaEvalConfig& cfg) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidParam(fmt::format("theta3: tau must be positive and finite, got {}", tau));
  }
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw InvalidParam("theta3: z must be finite");
  }
  if (!(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0) || cfg.max_terms < 3) {
    throw InvalidParam("theta3: invalid evaluation config");
  }
}

long checked_truncation(double tau_eff, const ThetaEvalConfig& cfg) {
  const long m = theta3_truncation(tau_eff, cfg.rel_tol);
  if (2 * m + 1 > cfg.max_terms) {
    throw NonConvergent(fmt::format(
        "theta3: {} terms needed at effective parameter {}, cap is {}", 2 * m + 1, tau_eff,
        cfg.max_terms));
  }
  return m;
}

}  // namespace

long theta3_truncation(double tau_eff, double rel_tol) {
  return static_cast<long>(std::ceil(std::sqrt(std::log(1.0 / rel_tol) / (kPi * tau_eff)))) + 2;
}

std::complex<double> theta3(std::complex<double> z, double tau, const ThetaEvalConfig& cfg) {
  check_inputs(z, tau, cfg);
  const double x = z.real();
  const double y = z.imag();
  std::complex<double> sum = 0.0;
  if (tau >= 1.0) {
    // Terms have modulus exp(-pi tau m^2 - 2 pi m y), largest near m = -y/tau.
    const long m0 = std::lround(-y / tau);
    const long half = checked_truncation(tau, cfg);
    for (long m = m0 - half; m <= m0 + half; ++m) {
      const double md = static_cast<double>(m);
      sum += std::exp(std::complex<double>(-kPi * tau * md * md - 2.0 * kPi * md * y,
                                           2.0 * kPi * md * x));
    }
    return sum;
  }
  // Modular transform: theta3(z, tau) = tau^{-1/2} exp(-pi z^2/tau) theta3(i z/tau, 1/tau).
  // The exp(-pi z^2/tau) prefactor is folded into each term, which turns the
  // series into sum_m exp(-pi (z + m)^2 / tau) and avoids overflow.
  const long m0 = std::lround(-x);
  const long half = checked_truncation(1.0 / tau, cfg);
  for (long m = m0 - half; m <= m0 + half; ++m) {
    const std::complex<double> s = z + static_cast<double>(m);
    sum += std::exp(-kPi * s * s / tau);
  }
  return sum / std::sqrt(tau);
}

double theta3(double z, double tau, const ThetaEvalConfig& cfg) {
  check_inputs(z, tau, cfg);
  double sum = 0.0;
  if (tau >= 1.0) {
    const long half = checked_truncation(tau, cfg);
    // Symmetric pairs m, -m combine into a cosine series.
    for (long m = half; m >= 1; --m) {
      const double md = static_cast<double>(m);
      sum += 2.0 * std::exp(-kPi * tau * md * md) * std::cos(2.0 * kPi * md * z);
    }
    return 1.0 + sum;
  }
  const long m0 = std::lround(-z);
  const long half = checked_truncation(1.0 / tau, cfg);
  for (long m = m0 - half; m <= m0 + half; ++m) {
    const double s = z + static_cast<double>(m);
    sum += std::exp(-kPi * s * s / tau);
  }
  return sum / std::sqrt(tau);
}

std::complex<double> theta3_normalized(std::complex<double> z, double tau,
                                       const ThetaEvalConfig& cfg) {
  return theta3(z, tau, cfg) / theta3(0.0, tau, cfg);
}

std::complex<double> theta3_multiplication_rhs(int a, int b, std::complex<double> z,
                                               std::complex<double> w, double tau,
                                               const ThetaEvalConfig& cfg) {
  if (a < 1 || b < 1) {
    throw InvalidParam(fmt::format("theta3_multiplication_rhs: a, b must be >= 1 (got {}, {})", a, b));
  }
  const double n = static_cast<double>(a + b);
  std::complex<double> sum = 0.0;
  for (int r = 0; r < a + b; ++r) {
    sum += theta3((static_cast<double>(a) * w + z + static_cast<double>(r)) / n, a * tau / n, cfg) *
           theta3((z - static_cast<double>(b) * w + static_cast<double>(r)) / n, b * tau / n, cfg);
  }
  return sum / n;
}

}  // namespace qclock
