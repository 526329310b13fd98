#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qclock/clock.hpp"
#include "qclock/rng.hpp"
#include "qclock/theta.hpp"

namespace qclock {

// sigma_m_sq: squared outcome imprecision in xi-tilde units (xi-tilde = time
// label / sqrt(d)). grid_oversample refines the outcome grid.
struct MeasurementParams {
  double sigma_m_sq = 1.0;
  int grid_oversample = 8;

  void validate() const;
};

// One observable exp(2 pi i m xi_tilde_I / sqrt(d)) in a pseudo-correlation;
// index I counts measurements from 1.
struct QueryTerm {
  int m = 0;
  int index = 1;
};

// Sorts terms by index and merges terms that share an index (their
// observables multiply, so the m values add). Throws InvalidQuery for
// indices outside [1, n_measurements].
std::vector<QueryTerm> canonical_queries(const std::vector<QueryTerm>& queries, int n_measurements);

// Kraus diagonal Omega_k(xi) = theta3(0, 2 s/d)^{-1/2} d^{-1/4} theta3((k - xi sqrt(d))/d, s/d),
// s = sigma_m_sq, for every time label k (ascending).
std::vector<double> kraus_diag(double xi_tilde, int d, const MeasurementParams& params,
                               const ThetaEvalConfig& cfg = {});

struct OutcomeDensity {
  std::vector<double> xi;
  std::vector<double> density;
  double step = 0.0;
};

// Outcome grid step: min(sigma_m sqrt(2 pi) / (8 sqrt d), 1 / (oversample sqrt d)).
double outcome_grid_step(int d, const MeasurementParams& params);

// f(xi) = sum_k Omega_k(xi)^2 |<theta_k|psi>|^2 on a uniform grid over [-sqrt(d)/2, sqrt(d)/2].
OutcomeDensity outcome_density(const StateVector& state, const MeasurementParams& params, int d,
                               const ThetaEvalConfig& cfg = {});

// Draws outcomes for a fixed (d, sigma_m_sq). Because the POVM normalizes
// each Omega_k^2 separately, f is the mixture sum_k |a_k|^2 Omega_k^2: the
// sampler picks a label k with probability |a_k|^2, then an offset
// u = k - xi sqrt(d) from the tabulated bump Omega^2 by inverse CDF with
// linear interpolation on the outcome grid.
class OutcomeSampler {
 public:
  OutcomeSampler(int d, const MeasurementParams& params, const ThetaEvalConfig& cfg = {});

  // Returns the outcome and replaces `time_amplitudes` (time basis) by the
  // normalized post-measurement amplitudes.
  double measure(cvec& time_amplitudes, RngStream& rng) const;

  int dim() const { return d_; }

 private:
  int d_;
  MeasurementParams params_;
  ThetaEvalConfig cfg_;
  std::vector<double> offsets_;
  std::vector<double> cdf_;
};

struct Outcome {
  double xi_tilde = 0.0;
  StateVector post_state;  // time basis
};

Outcome sample_outcome(const StateVector& state, const MeasurementParams& params, int d,
                       RngStream& rng, const ThetaEvalConfig& cfg = {});

struct TrajectoryRecord {
  std::vector<double> outcomes;
  std::vector<double> deltas;
  RngStreamKey stream;
  int d = 0;
  MeasurementParams params;

  // CSV with header `step,delta,outcome`.
  void write_csv(std::ostream& os) const;
};

// For each delta: evolve by delta grid units, then measure.
TrajectoryRecord run_chain(const StateVector& state, const std::vector<double>& deltas,
                           const MeasurementParams& params, int d, RngStream& rng,
                           const ThetaEvalConfig& cfg = {});
TrajectoryRecord run_chain(const StateVector& state, const std::vector<double>& deltas,
                           const OutcomeSampler& sampler, const MeasurementParams& params,
                           RngStream& rng);

// Maps an outcome increment to its representative in (-sqrt(d)/2, sqrt(d)/2].
double unwrap_increment(double increment, int d);

inline constexpr int kOracleDimensionCap = 64;

// Exact pseudo-correlation <prod_k exp(2 pi i m_k xi_{I_k} / sqrt(d))> by
// density-matrix propagation in the time basis. Each measurement multiplies
// rho_{kk'} elementwise by
//   theta3((k-k')/d - i s m/d, 2 s/d) / theta3(0, 2 s/d) * exp(2 pi i m k'/d - pi s m^2/d)
// with m = 0 at measurements that are not queried.
std::complex<double> oracle_moment(const ClockParams& clock, const std::vector<double>& deltas,
                                   const MeasurementParams& params,
                                   const std::vector<QueryTerm>& queries,
                                   const ThetaEvalConfig& cfg = {});

// Same channel in the equivalent form with the phase on k:
//   theta3((k-k')/d + i s m/d, 2 s/d) / theta3(0, 2 s/d) * exp(2 pi i m k/d - pi s m^2/d).
std::complex<double> oracle_moment_phase_on_k(const ClockParams& clock,
                                              const std::vector<double>& deltas,
                                              const MeasurementParams& params,
                                              const std::vector<QueryTerm>& queries,
                                              const ThetaEvalConfig& cfg = {});

}  // namespace qclock
