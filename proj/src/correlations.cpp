#include "qclock/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <fmt/format.h>

#include "qclock/errors.hpp"
#include "qclock/parallel.hpp"
#include "qclock/rng.hpp"

namespace qclock {

namespace {

constexpr double kPi = std::numbers::pi;

int sign_of(int x) { return (x > 0) - (x < 0); }

int wrap_label(int p, int d) {
  const int h = half_width(d);
  int r = (p + h) % d;
  if (r < 0) r += d;
  return r - h;
}

std::vector<double> cumulative(const std::vector<double>& probs) {
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  for (auto& c : cdf) c /= acc;
  return cdf;
}

int draw_label(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const size_t pos = std::min<size_t>(static_cast<size_t>(it - cdf.begin()), cdf.size() - 1);
  return static_cast<int>(pos) - half_width(static_cast<int>(cdf.size()));
}

void check_positive_sigma(const MeasurementParams& meas) {
  meas.validate();
  if (meas.sigma_m_sq == 0.0) {
    throw InvalidParam("sigma_m_sq = 0: use the timebasis module for projective measurements");
  }
}

std::complex<double> damping_factor(double delta, int offset) {
  return std::polar(1.0, 2.0 * kPi * delta * sign_of(offset));
}

}  // namespace

std::vector<double> step_distribution(int d, double sigma_m_sq, int shift, const ThetaEvalConfig& cfg) {
  check_odd_dimension(d);
  if (!(sigma_m_sq > 0.0)) throw InvalidParam("step_distribution: sigma_m_sq must be positive");
  const int h = half_width(d);
  const double dd = static_cast<double>(d);
  const double s = sigma_m_sq;
  const double denom = std::sqrt(2.0 * s * dd) * std::exp(-kPi * s * shift * shift / (2.0 * dd)) *
                       theta3(std::complex<double>(0.0, s * shift / dd), 2.0 * s / dd, cfg).real();
  std::vector<double> out(static_cast<size_t>(d));
  double total = 0.0;
  for (int q = -h; q <= h; ++q) {
    const double v = theta3(q / dd + shift / (2.0 * dd), 1.0 / (2.0 * s * dd), cfg) / denom;
    out[static_cast<size_t>(q + h)] = v;
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-8) {
    throw NormalizationDrift(fmt::format("step distribution sums to {} (d={}, s={}, shift={})", total, d, s, shift));
  }
  return out;
}

double wavefunction_bracket(const ClockParams& clock, int r, const ThetaEvalConfig& cfg) {
  clock.validate();
  const double dd = static_cast<double>(clock.d);
  const double xi2 = clock.width_sq;
  const double rr = static_cast<double>(r);
  const double narrow = 1.0 / (2.0 * xi2 * dd);
  const double wide = dd / (2.0 * xi2);
  return theta3(rr / (2.0 * dd), narrow, cfg) * theta3(rr / 2.0, wide, cfg) +
         theta3(0.5 - rr / (2.0 * dd), narrow, cfg) * theta3(rr / 2.0 + 0.5, wide, cfg);
}

std::vector<double> initial_distribution(const ClockParams& clock, int msum, const ThetaEvalConfig& cfg) {
  clock.validate();
  const int d = clock.d;
  if (std::abs(msum) >= d) {
    throw InvalidQuery(fmt::format("initial_distribution: |msum| = {} must be < d = {}", std::abs(msum), d));
  }
  const int h = half_width(d);
  const double dd = static_cast<double>(d);
  const double tau = 1.0 / (clock.width_sq * dd);
  const double norm = 0.5 * dd * wavefunction_bracket(clock, msum, cfg);
  if (!(norm > 0.0)) {
    throw NormalizationDrift(fmt::format("initial_distribution: non-positive normalizer {} at msum={}", norm, msum));
  }
  std::vector<double> out(static_cast<size_t>(d));
  double total = 0.0;
  for (int p = -h; p <= h; ++p) {
    const double v = theta3((p - clock.n0 - msum) / dd, tau, cfg) * theta3((p - clock.n0) / dd, tau, cfg) / norm;
    out[static_cast<size_t>(p + h)] = v;
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw NormalizationDrift(fmt::format("initial distribution sums to {}", total));
  }
  return out;
}

WalkPlan make_walk_plan(const CorrelationQuery& query) {
  query.clock.validate();
  check_positive_sigma(query.meas);
  const int d = query.clock.d;
  const int n_meas = static_cast<int>(query.deltas.size());
  const std::vector<QueryTerm> terms = canonical_queries(query.queries, n_meas);
  WalkPlan plan;
  plan.d = d;
  plan.steps = terms.empty() ? 0 : terms.back().index;
  plan.offsets.assign(static_cast<size_t>(plan.steps), 0);
  plan.step_shifts.assign(static_cast<size_t>(plan.steps), 0);
  plan.deltas.assign(query.deltas.begin(), query.deltas.begin() + plan.steps);
  int suffix = 0;
  size_t t = terms.size();
  for (int j = plan.steps; j >= 1; --j) {
    if (t > 0 && terms[t - 1].index == j) {
      suffix += terms[t - 1].m;
      plan.step_shifts[static_cast<size_t>(j - 1)] = -terms[t - 1].m;
      --t;
    }
    if (std::abs(suffix) >= d) {
      throw InvalidQuery(fmt::format("suffix sum {} violates |sum| < d = {}", suffix, d));
    }
    plan.offsets[static_cast<size_t>(j - 1)] = -suffix;
  }
  plan.initial_msum = plan.steps > 0 ? plan.offsets[0] : 0;
  return plan;
}

std::complex<double> c3_transfer_matrix(const CorrelationQuery& query, DftPath path,
                                        const ThetaEvalConfig& cfg) {
  const WalkPlan plan = make_walk_plan(query);
  if (plan.steps == 0) return 1.0;
  const int d = plan.d;
  const int h = half_width(d);
  const std::vector<double> init = initial_distribution(query.clock, plan.initial_msum, cfg);
  cvec w(init.begin(), init.end());

  std::map<int, CircularConvolver> kernels;
  for (int j = 1; j <= plan.steps; ++j) {
    const int offset = plan.offsets[static_cast<size_t>(j - 1)];
    if (offset != 0) {
      const std::complex<double> factor = damping_factor(plan.deltas[static_cast<size_t>(j - 1)], offset);
      for (int p = -h; p <= h; ++p) {
        if (std::abs(p - offset) > h) w[static_cast<size_t>(p + h)] *= factor;
      }
    }
    const int shift = plan.step_shifts[static_cast<size_t>(j - 1)];
    auto it = kernels.find(shift);
    if (it == kernels.end()) {
      it = kernels.emplace(shift, CircularConvolver(step_distribution(d, query.meas.sigma_m_sq, shift, cfg), path)).first;
    }
    std::complex<double> before = 0.0;
    for (const auto& x : w) before += x;
    it->second.apply(w);
    std::complex<double> after = 0.0;
    for (const auto& x : w) after += x;
    if (std::abs(after - before) > 1e-9) {
      throw NormalizationDrift(fmt::format("convolution changed the walk mass by {} at step {}", std::abs(after - before), j));
    }
  }
  std::complex<double> total = 0.0;
  for (const auto& x : w) total += x;
  return total;
}

MonteCarloEstimate c3_monte_carlo(const CorrelationQuery& query, long samples, std::uint64_t seed,
                                  int threads, const ThetaEvalConfig& cfg) {
  if (samples < 1) throw InvalidParam("c3_monte_carlo: samples must be >= 1");
  const WalkPlan plan = make_walk_plan(query);
  if (plan.steps == 0) return MonteCarloEstimate{1.0, 0.0};
  const int d = plan.d;
  const int h = half_width(d);
  const std::vector<double> init_cdf = cumulative(initial_distribution(query.clock, plan.initial_msum, cfg));
  std::map<int, std::vector<double>> step_cdfs;
  for (int shift : plan.step_shifts) {
    if (!step_cdfs.count(shift)) {
      step_cdfs.emplace(shift, cumulative(step_distribution(d, query.meas.sigma_m_sq, shift, cfg)));
    }
  }
  std::vector<const std::vector<double>*> cdf_at(static_cast<size_t>(plan.steps));
  std::vector<std::complex<double>> factor_at(static_cast<size_t>(plan.steps));
  for (int j = 0; j < plan.steps; ++j) {
    cdf_at[static_cast<size_t>(j)] = &step_cdfs.at(plan.step_shifts[static_cast<size_t>(j)]);
    factor_at[static_cast<size_t>(j)] = damping_factor(plan.deltas[static_cast<size_t>(j)], plan.offsets[static_cast<size_t>(j)]);
  }

  struct Partial {
    long double re = 0, im = 0, re2 = 0, im2 = 0;
  };
  constexpr long kBlock = 1024;
  const size_t n_blocks = static_cast<size_t>((samples + kBlock - 1) / kBlock);
  std::vector<Partial> partials(n_blocks);
  parallel_blocks(n_blocks, threads, [&](size_t b) {
    Partial acc;
    const long begin = static_cast<long>(b) * kBlock;
    const long end = std::min(samples, begin + kBlock);
    for (long i = begin; i < end; ++i) {
      RngStream rng({seed, experiment_ids::kC3MonteCarlo, static_cast<std::uint64_t>(i)});
      int p = draw_label(init_cdf, rng.uniform());
      std::complex<double> weight = 1.0;
      for (int j = 0; j < plan.steps; ++j) {
        const int offset = plan.offsets[static_cast<size_t>(j)];
        if (offset != 0 && std::abs(p - offset) > h) weight *= factor_at[static_cast<size_t>(j)];
        p = wrap_label(p + draw_label(*cdf_at[static_cast<size_t>(j)], rng.uniform()), d);
      }
      acc.re += weight.real();
      acc.im += weight.imag();
      acc.re2 += static_cast<long double>(weight.real()) * weight.real();
      acc.im2 += static_cast<long double>(weight.imag()) * weight.imag();
    }
    partials[b] = acc;
  });
  Partial total;
  for (const auto& p : partials) {
    total.re += p.re;
    total.im += p.im;
    total.re2 += p.re2;
    total.im2 += p.im2;
  }
  const long double n = static_cast<long double>(samples);
  const long double mean_re = total.re / n;
  const long double mean_im = total.im / n;
  MonteCarloEstimate out;
  out.estimate = {static_cast<double>(mean_re), static_cast<double>(mean_im)};
  if (samples > 1) {
    const long double var_re = std::max<long double>(0, (total.re2 - n * mean_re * mean_re) / (n - 1));
    const long double var_im = std::max<long double>(0, (total.im2 - n * mean_im * mean_im) / (n - 1));
    out.std_error = static_cast<double>(std::sqrt((var_re + var_im) / n));
  }
  return out;
}

FactorBreakdown factors_with_c3(const CorrelationQuery& query, std::complex<double> c3,
                                const ThetaEvalConfig& cfg) {
  query.clock.validate();
  check_positive_sigma(query.meas);
  const int d = query.clock.d;
  const double dd = static_cast<double>(d);
  const double s = query.meas.sigma_m_sq;
  const std::vector<QueryTerm> terms = canonical_queries(query.queries, static_cast<int>(query.deltas.size()));
  FactorBreakdown out;
  int msum = 0;
  double phase_arg = 0.0;
  double c2 = 1.0;
  const double theta_zero = theta3(0.0, 2.0 * s / dd, cfg);
  for (const auto& t : terms) {
    msum += t.m;
    double elapsed = 0.0;
    for (int j = 0; j < t.index; ++j) elapsed += query.deltas[static_cast<size_t>(j)];
    phase_arg += t.m * elapsed;
    c2 *= theta3(std::complex<double>(0.0, s * t.m / dd), 2.0 * s / dd, cfg).real() / theta_zero *
          std::exp(-kPi * s * t.m * t.m / dd);
  }
  out.phase = std::polar(1.0, 2.0 * kPi * phase_arg / dd);
  out.c1 = wavefunction_bracket(query.clock, msum, cfg) / wavefunction_bracket(query.clock, 0, cfg);
  out.c2 = c2;
  out.c3 = c3;
  out.product = out.phase * out.c1 * out.c2 * out.c3;
  return out;
}

FactorBreakdown factors_exact(const CorrelationQuery& query, const ThetaEvalConfig& cfg) {
  return factors_with_c3(query, c3_transfer_matrix(query, DftPath::Auto, cfg), cfg);
}

double asymptotic_c1(double d, double alpha, double c_const, int r) {
  return std::exp(-kPi * c_const * r * r * std::pow(d, alpha - 1.0) / 2.0);
}

double asymptotic_c2(double d, double beta, double c_const, const std::vector<int>& ms) {
  double sum_sq = 0.0;
  for (int m : ms) sum_sq += static_cast<double>(m) * m;
  return std::exp(-kPi * c_const * sum_sq * std::pow(d, beta - 1.0) / 2.0);
}

double sharp_bound(double d, double t) { return 1.0 - t / std::sqrt(d); }

}  // namespace qclock
