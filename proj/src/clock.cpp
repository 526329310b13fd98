#include "qclock/clock.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "qclock/errors.hpp"

namespace qclock {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

Eigen::MatrixXcd time_basis_evolution_matrix(int d, double t) {
  check_odd_dimension(d);
  const int h = half_width(d);
  Eigen::MatrixXcd f(d, d);  // f(n, k) = <n|theta_k>
  for (int n = -h; n <= h; ++n) {
    for (int k = -h; k <= h; ++k) {
      f(n + h, k + h) = std::polar(1.0 / std::sqrt(static_cast<double>(d)), -2.0 * kPi * k * n / d);
    }
  }
  Eigen::VectorXcd phase(d);
  for (int n = -h; n <= h; ++n) phase(n + h) = std::polar(1.0, -2.0 * kPi * n * t / d);
  return f.adjoint() * phase.asDiagonal() * f;
}

void check_odd_dimension(int d) {
  if (d < 3 || d % 2 == 0) {
    throw InvalidParam(fmt::format("dimension must be odd and >= 3, got {}", d));
  }
}

void ClockParams::validate() const {
  check_odd_dimension(d);
  if (!(width_sq > 0.0) || !std::isfinite(width_sq)) {
    throw InvalidParam(fmt::format("width_sq must be positive, got {}", width_sq));
  }
  if (std::abs(n0) > half_width(d)) {
    throw InvalidParam(fmt::format("n0 = {} outside [-{}, {}]", n0, half_width(d), half_width(d)));
  }
}

double StateVector::norm_sq() const {
  double s = 0.0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return s;
}

double quasi_ideal_normalizer(int d, double width_sq, const ThetaEvalConfig& cfg) {
  // sum_k theta3(k/d, xi^2/d)^2
  //   = (d/2) [theta3(0, xi^2/(2d)) theta3(0, d xi^2/2) + theta3(1/2, xi^2/(2d)) theta3(d/2, d xi^2/2)]
  const double dd = static_cast<double>(d);
  const double bracket = theta3(0.0, width_sq / (2.0 * dd), cfg) * theta3(0.0, dd * width_sq / 2.0, cfg) +
                         theta3(0.5, width_sq / (2.0 * dd), cfg) * theta3(dd / 2.0, dd * width_sq / 2.0, cfg);
  return std::sqrt(2.0 / dd) / std::sqrt(bracket);
}

StateVector build_quasi_ideal_state(const ClockParams& params, const ThetaEvalConfig& cfg) {
  params.validate();
  const int d = params.d;
  const int h = half_width(d);
  const double norm = quasi_ideal_normalizer(d, params.width_sq, cfg);
  StateVector time_state{cvec(static_cast<size_t>(d)), Basis::Time};
  for (int k = -h; k <= h; ++k) {
    time_state.at(k) = norm * theta3(static_cast<double>(k) / d, params.width_sq / d, cfg) *
                       std::polar(1.0, 2.0 * kPi * params.n0 * k / d);
  }
  const double deviation = std::abs(time_state.norm_sq() - 1.0);
  if (deviation > 1e-10) {
    throw NormalizationDrift(fmt::format("quasi-ideal state norm deviates by {}", deviation));
  }
  return change_basis(time_state, Basis::Energy);
}

StateVector time_eigenstate(int d, int j) {
  check_odd_dimension(d);
  const int h = half_width(d);
  if (std::abs(j) > h) {
    throw IndexOutOfRange(fmt::format("time label {} outside [-{}, {}]", j, h, h));
  }
  StateVector s{cvec(static_cast<size_t>(d)), Basis::Energy};
  for (int n = -h; n <= h; ++n) {
    s.at(n) = std::polar(1.0 / std::sqrt(static_cast<double>(d)), -2.0 * kPi * j * n / d);
  }
  return s;
}

StateVector change_basis(const StateVector& state, Basis target, DftPath path) {
  check_odd_dimension(state.dim());
  if (state.basis == target) return state;
  // Energy -> time: a_k = d^{-1/2} sum_n exp(+2 pi i k n/d) psi(n); time -> energy uses the inverse.
  const int sign = target == Basis::Time ? +1 : -1;
  return StateVector{centered_dft(state.amplitudes, sign, path), target};
}

StateVector evolve(const StateVector& state, double dt_grid, DftPath path) {
  StateVector out = change_basis(state, Basis::Energy, path);
  const int d = out.dim();
  const int h = half_width(d);
  for (int n = -h; n <= h; ++n) {
    out.at(n) *= std::polar(1.0, -2.0 * kPi * n * dt_grid / d);
  }
  return out;
}

std::complex<double> qnd_commutator_element(const ClockParams& params, double t0, double t1,
                                            int k, bool periodic, std::pair<int, int> winding,
                                            int dense_cap, const ThetaEvalConfig& cfg) {
  params.validate();
  const int d = params.d;
  const int h = half_width(d);
  if (d > dense_cap) {
    throw DimensionTooLarge(fmt::format("dense commutator requested at d = {} > cap {}", d, dense_cap));
  }
  if (std::abs(t0) >= h || std::abs(t1) >= h) {
    throw InvalidParam("commutator times must satisfy |t| < (d-1)/2");
  }
  if (std::abs(k) > h) {
    throw IndexOutOfRange(fmt::format("time label {} outside [-{}, {}]", k, h, h));
  }
  const StateVector psi = change_basis(build_quasi_ideal_state(params, cfg), Basis::Time);
  Eigen::VectorXcd v(d);
  for (int j = 0; j < d; ++j) v(j) = psi.amplitudes[static_cast<size_t>(j)];

  auto heisenberg_operator = [&](double t, int winding_number) {
    Eigen::VectorXcd diag(d);
    for (int j = -h; j <= h; ++j) {
      diag(j + h) = periodic ? std::polar(1.0, 2.0 * kPi * winding_number * j / d)
                             : std::complex<double>(j, 0.0);
    }
    const Eigen::MatrixXcd u = time_basis_evolution_matrix(d, t);
    return Eigen::MatrixXcd(u.adjoint() * diag.asDiagonal() * u);
  };
  const Eigen::MatrixXcd a = heisenberg_operator(t0, winding.first);
  const Eigen::MatrixXcd b = heisenberg_operator(t1, winding.second);
  const Eigen::VectorXcd out = a * (b * v) - b * (a * v);
  return out(k + h);
}

}  // namespace qclock
