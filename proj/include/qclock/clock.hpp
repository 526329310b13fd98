#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qclock/fourier.hpp"
#include "qclock/theta.hpp"

namespace qclock {

enum class Basis { Energy, Time };

// d: odd dimension; width_sq: xi^2, the envelope width parameter (the time
// variance of the state is width_sq * d / (4 pi) in index units); n0: mean
// energy label.
struct ClockParams {
  int d = 3;
  double width_sq = 1.0;
  int n0 = 0;

  void validate() const;
};

// Amplitudes on the centered labels -(d-1)/2 .. (d-1)/2, in ascending order.
// Energy label n and time label k are related by <n|theta_k> = exp(-2 pi i k n/d)/sqrt(d).
struct StateVector {
  cvec amplitudes;
  Basis basis = Basis::Energy;

  int dim() const { return static_cast<int>(amplitudes.size()); }
  double norm_sq() const;
  std::complex<double>& at(int label) { return amplitudes[label + half_width(dim())]; }
  const std::complex<double>& at(int label) const { return amplitudes[label + half_width(dim())]; }
};

void check_odd_dimension(int d);

// Quasi-ideal clock state. The theta envelope
//   <theta_k|Psi> = N theta3(k/d, xi^2/d) exp(2 pi i n0 k/d)
// is built on the time labels and returned in the energy basis, where it
// reads N' theta3((n - n0)/d, 1/(xi^2 d)).
StateVector build_quasi_ideal_state(const ClockParams& params, const ThetaEvalConfig& cfg = {});

// Normalizer N of the time-label envelope above (and N' with width_sq -> 1/width_sq).
double quasi_ideal_normalizer(int d, double width_sq, const ThetaEvalConfig& cfg = {});

// |theta_j> expressed in the energy basis.
StateVector time_eigenstate(int d, int j);

// Free evolution by dt_grid grid units (physical time dt_grid / sqrt(d)):
// energy amplitude n picks up exp(-2 pi i n dt_grid / d). Returns energy basis.
StateVector evolve(const StateVector& state, double dt_grid, DftPath path = DftPath::Auto);

StateVector change_basis(const StateVector& state, Basis target, DftPath path = DftPath::Auto);

// Dense free evolution by t grid units in the time basis,
//   U_ab = <theta_a|U(t)|theta_b> = (1/d) sum_n exp(2 pi i n (a - b - t)/d).
Eigen::MatrixXcd time_basis_evolution_matrix(int d, double t);

inline constexpr int kDenseDimensionCap = 2049;

// <theta_k| [A(t0), A(t1)] |Psi0> for the quasi-ideal state, where A(t) is
// U(t)^dag T U(t) with T = sum_k k |theta_k><theta_k| (periodic = false), or
// exp(2 pi i m T(t0)/d) and exp(2 pi i n T(t1)/d) for the two factors when
// periodic = true, with (m, n) = winding. Dense linear algebra.
std::complex<double> qnd_commutator_element(const ClockParams& params, double t0, double t1,
                                            int k, bool periodic,
                                            std::pair<int, int> winding = {1, 1},
                                            int dense_cap = kDenseDimensionCap,
                                            const ThetaEvalConfig& cfg = {});

}  // namespace qclock
