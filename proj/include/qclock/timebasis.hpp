#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qclock/measurement.hpp"
#include "qclock/rng.hpp"

namespace qclock {

// Projective time-basis measurement every `delta` grid units, starting from |theta_k0>.
struct TimeBasisChainParams {
  int d = 3;
  double delta = 0.5;
  int k0 = 0;

  void validate() const;
};

// M_lk = (1/d) sum_r exp(2 pi i r (l - k - delta)/d) (1 - (1 - exp(2 pi i delta sign r)) |r|/d),
// r over centered labels; columns are the jump laws out of k.
Eigen::MatrixXd transition_matrix(int d, double delta);

// Jump law P(j) = |<theta_j| U(delta) |theta_0>|^2
//   = sin^2(pi (j - delta)) / (d^2 sin^2(pi (j - delta)/d)),
// valid for any d >= 2 (labels -floor(d/2) .. d - 1 - floor(d/2)).
std::vector<double> jump_distribution(int d, double delta);

// <prod_p exp(2 pi i m_p k_{I_p} / d)> for the chain started at k0:
//   exp(2 pi i (sum m) k0 / d) exp(2 pi i delta sum_p m_p I_p / d)
//   prod_p (1 - (1 - exp(-2 pi i delta sign S_p)) |S_p| / d)^(I_p - I_{p-1}),
// with S_p = sum_{l >= p} m_l the suffix sums (I_0 = 0).
std::complex<double> analytic_moment(int d, double delta, int k0, const std::vector<QueryTerm>& queries);

// Labels k_1 .. k_steps of a sampled chain (k_0 = params.k0 is not included).
std::vector<int> sample_chain(const TimeBasisChainParams& params, int steps, RngStream& rng);

// Sampler with a precomputed jump CDF; usable for any d >= 2.
class TimeBasisChainSampler {
 public:
  TimeBasisChainSampler(int d, double delta);
  int step(int label, RngStream& rng) const;
  int dim() const { return d_; }

 private:
  int d_;
  std::vector<double> cdf_;
};

// exp(2 pi i sum_k theta_k t_k) exp(-2 sum_k |sum_{l >= k} theta_l| (t_k - t_{k-1})), t_0 = 0.
std::complex<double> cauchy_limit_cf(const std::vector<double>& thetas, const std::vector<double>& times);

// exp(2 pi i sum_k theta_k t_k).
std::complex<double> uniform_limit_cf(const std::vector<double>& thetas, const std::vector<double>& times);

struct EmpiricalCf {
  std::complex<double> value = 0.0;
  double std_error = 0.0;
};

// Empirical single-time characteristic functions E[exp(2 pi i theta Xi_t)] of
// the rescaled sharp-measurement process Xi_t = k_{floor(2 t sqrt d)} / sqrt(d)
// with d = 4^p and delta = 1/2, started at label 0. Result [i][j] belongs to
// (thetas[i], times[j]).
std::vector<std::vector<EmpiricalCf>> scaled_process_cf(int p, const std::vector<double>& thetas,
                                                        const std::vector<double>& times, long chains,
                                                        std::uint64_t seed, int threads = 1);

}  // namespace qclock
