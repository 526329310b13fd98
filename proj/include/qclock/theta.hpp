#pragma once

#include <complex>

namespace qclock {

// Accuracy controls for the theta series. The series is truncated where the
// Gaussian tail falls below rel_tol relative to the dominant term.
struct ThetaEvalConfig {
  double rel_tol = 1e-12;
  long max_terms = 1000000;
};

// theta3(z, tau) = sum_m exp(-pi tau m^2 + 2 pi i m z), i.e. the Jacobi theta
// function with purely imaginary modular parameter i*tau, tau > 0.
std::complex<double> theta3(std::complex<double> z, double tau,
                            const ThetaEvalConfig& cfg = {});

// Real-argument overload; the value is real and positive.
double theta3(double z, double tau, const ThetaEvalConfig& cfg = {});

// theta3(z, tau) / theta3(0, tau).
std::complex<double> theta3_normalized(std::complex<double> z, double tau,
                                       const ThetaEvalConfig& cfg = {});

// Right-hand side of the product formula
//   theta3(z, a b tau) theta3(w, tau)
//     = 1/(a+b) sum_{0<=r<a+b} theta3((a w + z + r)/(a+b), a tau/(a+b))
//                              theta3((z - b w + r)/(a+b), b tau/(a+b)).
std::complex<double> theta3_multiplication_rhs(int a, int b, std::complex<double> z,
                                               std::complex<double> w, double tau,
                                               const ThetaEvalConfig& cfg = {});

// Number of series terms kept on each side of the dominant index for an
// effective parameter tau_eff >= 1.
long theta3_truncation(double tau_eff, double rel_tol);

}  // namespace qclock
