#include "qclock/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "qclock/errors.hpp"

namespace qclock {

namespace {

constexpr double kPi = std::numbers::pi;

double sqrt_d(int d) { return std::sqrt(static_cast<double>(d)); }

double kraus_prefactor(int d, double s, const ThetaEvalConfig& cfg) {
  return 1.0 / std::sqrt(theta3(0.0, 2.0 * s / d, cfg)) / std::pow(static_cast<double>(d), 0.25);
}

void check_outcome(double xi_tilde, int d) {
  const double half = 0.5 * sqrt_d(d);
  if (!(std::abs(xi_tilde) <= half * (1.0 + 1e-12))) {
    throw InvalidParam(fmt::format("outcome {} outside [-{}, {}]", xi_tilde, half, half));
  }
}

// Elementwise channel multiplier as a function of the label difference k - k'
// (stored at offset k - k' + d - 1), without the phase factor.
std::vector<std::complex<double>> channel_profile(int d, double s, int m, int shift_sign,
                                                  const ThetaEvalConfig& cfg) {
  const double norm = theta3(0.0, 2.0 * s / d, cfg);
  std::vector<std::complex<double>> out(static_cast<size_t>(2 * d - 1));
  for (int diff = -(d - 1); diff <= d - 1; ++diff) {
    const std::complex<double> z(static_cast<double>(diff) / d, shift_sign * s * m / d);
    out[static_cast<size_t>(diff + d - 1)] = theta3(z, 2.0 * s / d, cfg) / norm;
  }
  return out;
}

std::complex<double> oracle_impl(const ClockParams& clock, const std::vector<double>& deltas,
                                 const MeasurementParams& params,
                                 const std::vector<QueryTerm>& queries, bool phase_on_k,
                                 const ThetaEvalConfig& cfg) {
  clock.validate();
  params.validate();
  const int d = clock.d;
  const int h = half_width(d);
  if (d > kOracleDimensionCap) {
    throw DimensionTooLarge(fmt::format("oracle requested at d = {} > cap {}", d, kOracleDimensionCap));
  }
  const int n_meas = static_cast<int>(deltas.size());
  const std::vector<QueryTerm> terms = canonical_queries(queries, n_meas);
  std::map<int, int> m_at;
  int suffix = 0;
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
    suffix += it->m;
    if (std::abs(suffix) >= d) {
      throw InvalidQuery(fmt::format("suffix sum {} violates |sum| < d = {}", suffix, d));
    }
    m_at[it->index] = it->m;
  }

  const StateVector psi = change_basis(build_quasi_ideal_state(clock, cfg), Basis::Time);
  Eigen::VectorXcd v(d);
  for (int j = 0; j < d; ++j) v(j) = psi.amplitudes[static_cast<size_t>(j)];
  Eigen::MatrixXcd rho = v * v.adjoint();

  const double s = params.sigma_m_sq;
  std::map<int, std::vector<std::complex<double>>> profiles;
  auto profile_for = [&](int m) -> const std::vector<std::complex<double>>& {
    auto it = profiles.find(m);
    if (it == profiles.end()) {
      it = profiles.emplace(m, channel_profile(d, s, m, phase_on_k ? +1 : -1, cfg)).first;
    }
    return it->second;
  };

  std::map<double, Eigen::MatrixXcd> evolutions;
  for (int j = 1; j <= n_meas; ++j) {
    const double delta = deltas[static_cast<size_t>(j - 1)];
    auto ev = evolutions.find(delta);
    if (ev == evolutions.end()) ev = evolutions.emplace(delta, time_basis_evolution_matrix(d, delta)).first;
    rho = ev->second * rho * ev->second.adjoint();

    const auto found = m_at.find(j);
    const int m = found == m_at.end() ? 0 : found->second;
    const auto& profile = profile_for(m);
    const double damping = std::exp(-kPi * s * m * m / d);
    for (int k = -h; k <= h; ++k) {
      for (int kp = -h; kp <= h; ++kp) {
        const int phase_label = phase_on_k ? k : kp;
        const std::complex<double> factor =
            profile[static_cast<size_t>(k - kp + d - 1)] * damping *
            std::polar(1.0, 2.0 * kPi * m * phase_label / d);
        rho(k + h, kp + h) *= factor;
      }
    }
  }
  return rho.trace();
}

}  // namespace

void MeasurementParams::validate() const {
  if (!(sigma_m_sq >= 0.0) || !std::isfinite(sigma_m_sq)) {
    throw InvalidParam(fmt::format("sigma_m_sq must be non-negative, got {}", sigma_m_sq));
  }
  if (grid_oversample < 1) {
    throw InvalidParam("grid_oversample must be >= 1");
  }
}

std::vector<QueryTerm> canonical_queries(const std::vector<QueryTerm>& queries, int n_measurements) {
  std::map<int, int> merged;
  for (const auto& q : queries) {
    if (q.index < 1 || q.index > n_measurements) {
      throw InvalidQuery(fmt::format("query index {} outside [1, {}]", q.index, n_measurements));
    }
    merged[q.index] += q.m;
  }
  std::vector<QueryTerm> out;
  out.reserve(merged.size());
  for (const auto& [index, m] : merged) out.push_back(QueryTerm{m, index});
  return out;
}

std::vector<double> kraus_diag(double xi_tilde, int d, const MeasurementParams& params,
                               const ThetaEvalConfig& cfg) {
  check_odd_dimension(d);
  params.validate();
  if (params.sigma_m_sq == 0.0) {
    throw InvalidParam("kraus_diag: sigma_m_sq = 0 is a projective measurement; use the timebasis module");
  }
  check_outcome(xi_tilde, d);
  const int h = half_width(d);
  const double s = params.sigma_m_sq;
  const double pref = kraus_prefactor(d, s, cfg);
  const double center = xi_tilde * sqrt_d(d);
  std::vector<double> out(static_cast<size_t>(d));
  for (int k = -h; k <= h; ++k) {
    out[static_cast<size_t>(k + h)] = pref * theta3((k - center) / d, s / d, cfg);
  }
  return out;
}

double outcome_grid_step(int d, const MeasurementParams& params) {
  const double sigma = std::sqrt(params.sigma_m_sq);
  return std::min(sigma / (8.0 * sqrt_d(d)) * std::sqrt(2.0 * kPi),
                  1.0 / (params.grid_oversample * sqrt_d(d)));
}

OutcomeDensity outcome_density(const StateVector& state, const MeasurementParams& params, int d,
                               const ThetaEvalConfig& cfg) {
  params.validate();
  if (params.sigma_m_sq == 0.0) {
    throw InvalidParam("outcome_density: sigma_m_sq must be positive");
  }
  if (state.dim() != d) throw InvalidParam("outcome_density: state dimension mismatch");
  const StateVector ts = change_basis(state, Basis::Time);
  std::vector<double> prob(static_cast<size_t>(d));
  for (int j = 0; j < d; ++j) prob[static_cast<size_t>(j)] = std::norm(ts.amplitudes[static_cast<size_t>(j)]);

  const double width = sqrt_d(d);
  const long intervals = static_cast<long>(std::ceil(width / outcome_grid_step(d, params)));
  OutcomeDensity out;
  out.step = width / static_cast<double>(intervals);
  out.xi.resize(static_cast<size_t>(intervals + 1));
  out.density.resize(static_cast<size_t>(intervals + 1));
  for (long i = 0; i <= intervals; ++i) {
    const double xi = std::clamp(-0.5 * width + static_cast<double>(i) * out.step, -0.5 * width, 0.5 * width);
    const std::vector<double> omega = kraus_diag(xi, d, params, cfg);
    double f = 0.0;
    for (int j = 0; j < d; ++j) f += omega[static_cast<size_t>(j)] * omega[static_cast<size_t>(j)] * prob[static_cast<size_t>(j)];
    out.xi[static_cast<size_t>(i)] = xi;
    out.density[static_cast<size_t>(i)] = f;
  }
  return out;
}

OutcomeSampler::OutcomeSampler(int d, const MeasurementParams& params, const ThetaEvalConfig& cfg)
    : d_(d), params_(params), cfg_(cfg) {
  check_odd_dimension(d);
  params.validate();
  if (params.sigma_m_sq == 0.0) {
    throw InvalidParam("OutcomeSampler: sigma_m_sq must be positive");
  }
  const double s = params.sigma_m_sq;
  const double dd = static_cast<double>(d);
  // Omega^2 as a function of u = k - xi sqrt(d) is a periodized Gaussian of
  // variance d s / (4 pi); beyond the cut its mass is below 1e-19.
  const double cut = std::sqrt(45.0 * dd * s / (2.0 * kPi)) + 2.0;
  const double range = std::min(0.5 * dd, cut);
  const double du = sqrt_d(d) * outcome_grid_step(d, params);
  const long intervals = static_cast<long>(std::ceil(2.0 * range / du));
  const double step = 2.0 * range / static_cast<double>(intervals);
  offsets_.resize(static_cast<size_t>(intervals + 1));
  cdf_.resize(static_cast<size_t>(intervals + 1));
  double previous = 0.0;
  double total = 0.0;
  for (long i = 0; i <= intervals; ++i) {
    const double u = -range + static_cast<double>(i) * step;
    const double g = std::pow(theta3(u / dd, s / dd, cfg), 2);
    if (i > 0) total += 0.5 * (g + previous) * step;
    offsets_[static_cast<size_t>(i)] = u;
    cdf_[static_cast<size_t>(i)] = total;
    previous = g;
  }
  for (auto& c : cdf_) c /= total;
}

double OutcomeSampler::measure(cvec& amps, RngStream& rng) const {
  if (static_cast<int>(amps.size()) != d_) throw InvalidParam("OutcomeSampler: dimension mismatch");
  const int h = half_width(d_);
  double mass = 0.0;
  for (const auto& a : amps) mass += std::norm(a);
  if (!(mass > 1e-12)) {
    throw DegenerateDensity(fmt::format("outcome density has total mass {}", mass));
  }
  // Label k with probability |a_k|^2.
  const double target = rng.uniform() * mass;
  double acc = 0.0;
  int pos = d_ - 1;
  for (int j = 0; j < d_; ++j) {
    acc += std::norm(amps[static_cast<size_t>(j)]);
    if (acc > target) {
      pos = j;
      break;
    }
  }
  const int k = pos - h;
  // Offset by inverse CDF with linear interpolation.
  const double r = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), r);
  const size_t hi = std::clamp<size_t>(static_cast<size_t>(it - cdf_.begin()), 1, cdf_.size() - 1);
  const size_t lo = hi - 1;
  const double span = cdf_[hi] - cdf_[lo];
  const double frac = span > 0.0 ? (r - cdf_[lo]) / span : 0.5;
  const double u = offsets_[lo] + frac * (offsets_[hi] - offsets_[lo]);

  const double dd = static_cast<double>(d_);
  double x = static_cast<double>(k) - u;
  x -= dd * std::floor((x + 0.5 * dd) / dd);
  const double xi = x / sqrt_d(d_);

  const std::vector<double> omega = kraus_diag(xi, d_, params_, cfg_);
  double norm = 0.0;
  for (int j = 0; j < d_; ++j) {
    amps[static_cast<size_t>(j)] *= omega[static_cast<size_t>(j)];
    norm += std::norm(amps[static_cast<size_t>(j)]);
  }
  if (!(norm > 0.0)) throw DegenerateDensity("post-measurement state vanished");
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& a : amps) a *= scale;
  return xi;
}

Outcome sample_outcome(const StateVector& state, const MeasurementParams& params, int d,
                       RngStream& rng, const ThetaEvalConfig& cfg) {
  if (state.dim() != d) throw InvalidParam("sample_outcome: state dimension mismatch");
  const OutcomeSampler sampler(d, params, cfg);
  StateVector post = change_basis(state, Basis::Time);
  const double xi = sampler.measure(post.amplitudes, rng);
  return Outcome{xi, std::move(post)};
}

void TrajectoryRecord::write_csv(std::ostream& os) const {
  os << "step,delta,outcome\n";
  for (size_t i = 0; i < outcomes.size(); ++i) {
    os << fmt::format("{},{:.17g},{:.17g}\n", i + 1, deltas[i], outcomes[i]);
  }
}

TrajectoryRecord run_chain(const StateVector& state, const std::vector<double>& deltas,
                           const OutcomeSampler& sampler, const MeasurementParams& params,
                           RngStream& rng) {
  const int d = sampler.dim();
  if (state.dim() != d) throw InvalidParam("run_chain: state dimension mismatch");
  TrajectoryRecord record;
  record.deltas = deltas;
  record.stream = rng.key();
  record.d = d;
  record.params = params;
  record.outcomes.reserve(deltas.size());
  StateVector current = state;
  for (double delta : deltas) {
    current = change_basis(evolve(current, delta), Basis::Time);
    record.outcomes.push_back(sampler.measure(current.amplitudes, rng));
  }
  return record;
}

TrajectoryRecord run_chain(const StateVector& state, const std::vector<double>& deltas,
                           const MeasurementParams& params, int d, RngStream& rng,
                           const ThetaEvalConfig& cfg) {
  if (deltas.empty()) {
    TrajectoryRecord record;
    record.stream = rng.key();
    record.d = d;
    record.params = params;
    return record;
  }
  const OutcomeSampler sampler(d, params, cfg);
  return run_chain(state, deltas, sampler, params, rng);
}

double unwrap_increment(double increment, int d) {
  const double period = sqrt_d(d);
  return increment - period * std::ceil(increment / period - 0.5);
}

std::complex<double> oracle_moment(const ClockParams& clock, const std::vector<double>& deltas,
                                   const MeasurementParams& params,
                                   const std::vector<QueryTerm>& queries, const ThetaEvalConfig& cfg) {
  if (params.sigma_m_sq == 0.0) throw InvalidParam("oracle_moment: sigma_m_sq must be positive");
  return oracle_impl(clock, deltas, params, queries, false, cfg);
}

std::complex<double> oracle_moment_phase_on_k(const ClockParams& clock,
                                              const std::vector<double>& deltas,
                                              const MeasurementParams& params,
                                              const std::vector<QueryTerm>& queries,
                                              const ThetaEvalConfig& cfg) {
  if (params.sigma_m_sq == 0.0) throw InvalidParam("oracle_moment: sigma_m_sq must be positive");
  return oracle_impl(clock, deltas, params, queries, true, cfg);
}

}  // namespace qclock
