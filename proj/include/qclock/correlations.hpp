#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qclock/clock.hpp"
#include "qclock/fourier.hpp"
#include "qclock/measurement.hpp"

namespace qclock {

// A pseudo-correlation <prod_k exp(2 pi i m_k xi_{I_k} / sqrt(d))> after the
// measurement schedule `deltas` (grid units before each measurement).
struct CorrelationQuery {
  ClockParams clock;
  MeasurementParams meas;
  std::vector<double> deltas;
  std::vector<QueryTerm> queries;
};

// product = phase * c1 * c2 * c3. c1 comes from the initial wavefunction
// spread, c2 from the measurement imprecision, c3 from the backaction walk.
struct FactorBreakdown {
  std::complex<double> phase = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  std::complex<double> c3 = 1.0;
  std::complex<double> product = 1.0;
};

// Jump law of the energy walk between measurements:
//   q -> theta3(q/d + shift/(2d), 1/(2 s d)) / (sqrt(2 s d) exp(-pi s shift^2/(2d)) theta3(i s shift/d, 2 s/d)),
// s = sigma_m_sq, over centered labels q.
std::vector<double> step_distribution(int d, double sigma_m_sq, int shift,
                                      const ThetaEvalConfig& cfg = {});

// Initial law of the walk:
//   p -> theta3((p - n0 - msum)/d, 1/(xi^2 d)) theta3((p - n0)/d, 1/(xi^2 d)) / ((d/2) B(msum)),
// with B the two-term theta bracket (see wavefunction_bracket).
std::vector<double> initial_distribution(const ClockParams& clock, int msum,
                                         const ThetaEvalConfig& cfg = {});

// B(r) = theta3(r/(2d), 1/(2 xi^2 d)) theta3(r/2, d/(2 xi^2))
//      + theta3(1/2 - r/(2d), 1/(2 xi^2 d)) theta3(r/2 + 1/2, d/(2 xi^2)),
// so that sum_p psi~(p) psi~(p + r) is proportional to B(r).
double wavefunction_bracket(const ClockParams& clock, int r, const ThetaEvalConfig& cfg = {});

// Walk structure derived from a query. The walk runs on energy labels p.
// Before measurement j, let s_j = -sum_{I_k >= j} m_k. Sites with
// |p - s_j| > (d-1)/2 are damped by exp(+2 pi i delta_j sign(s_j)), then the
// walker jumps with step_distribution(shift = -m_j).
struct WalkPlan {
  int d = 0;
  int steps = 0;
  std::vector<int> offsets;        // s_j, j = 1..steps
  std::vector<int> step_shifts;    // -m_j (0 where not queried)
  std::vector<double> deltas;      // delta_j
  int initial_msum = 0;            // s_1
};

WalkPlan make_walk_plan(const CorrelationQuery& query);

// Exact walk expectation by forward propagation of a complex d-vector.
std::complex<double> c3_transfer_matrix(const CorrelationQuery& query,
                                        DftPath path = DftPath::Auto,
                                        const ThetaEvalConfig& cfg = {});

struct MonteCarloEstimate {
  std::complex<double> estimate = 0.0;
  double std_error = 0.0;  // sqrt(Var(Re w)/N + Var(Im w)/N)
};

MonteCarloEstimate c3_monte_carlo(const CorrelationQuery& query, long samples, std::uint64_t seed,
                                  int threads = 1, const ThetaEvalConfig& cfg = {});

// Phase, c1 and c2 in closed form; c3 by transfer matrix.
FactorBreakdown factors_exact(const CorrelationQuery& query, const ThetaEvalConfig& cfg = {});

// Same prefactors with a caller-supplied c3 (e.g. a Monte-Carlo estimate).
FactorBreakdown factors_with_c3(const CorrelationQuery& query, std::complex<double> c3,
                                const ThetaEvalConfig& cfg = {});

// Leading-order wavefunction factor for xi^2 = c d^alpha: exp(-pi c r^2 d^(alpha-1) / 2).
double asymptotic_c1(double d, double alpha, double c_const, int r);

// Leading-order imprecision factor for sigma_m^2 = c d^beta: exp(-pi c sum m^2 d^(beta-1) / 2).
double asymptotic_c2(double d, double beta, double c_const, const std::vector<int>& ms);

// 1 - t / sqrt(d): leading bound on |<exp(2 pi i xi_I / sqrt d)>| for sharp measurements.
double sharp_bound(double d, double t);

}  // namespace qclock
