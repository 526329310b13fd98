#include "qclock/timebasis.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "qclock/errors.hpp"
#include "qclock/fourier.hpp"
#include "qclock/parallel.hpp"

namespace qclock {

namespace {

constexpr double kPi = std::numbers::pi;

int sign_of(int x) { return (x > 0) - (x < 0); }

bool is_integer(double x) { return x == std::round(x); }

int lowest_label(int d) { return -(d / 2); }

int wrap_any(long label, int d) {
  const long lo = lowest_label(d);
  long r = (label - lo) % d;
  if (r < 0) r += d;
  return static_cast<int>(r + lo);
}

void check_times(const std::vector<double>& thetas, const std::vector<double>& times) {
  if (thetas.size() != times.size()) throw InvalidParam("thetas and times must have equal length");
  for (size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw InvalidParam("times must be strictly increasing");
  }
  if (!times.empty() && times.front() < 0.0) throw InvalidParam("times must be non-negative");
}

}  // namespace

void TimeBasisChainParams::validate() const {
  check_odd_dimension(d);
  if (std::abs(k0) > half_width(d)) throw IndexOutOfRange(fmt::format("k0 = {} out of range", k0));
  if (!std::isfinite(delta)) throw InvalidParam("delta must be finite");
}

Eigen::MatrixXd transition_matrix(int d, double delta) {
  check_odd_dimension(d);
  const int h = half_width(d);
  // The matrix is circulant: M_lk depends on j = l - k only.
  std::vector<double> jump(static_cast<size_t>(d));
  for (int j = -h; j <= h; ++j) {
    std::complex<double> acc = 0.0;
    for (int r = -h; r <= h; ++r) {
      const std::complex<double> weight =
          1.0 - (1.0 - std::polar(1.0, 2.0 * kPi * delta * sign_of(r))) * (std::abs(r) / static_cast<double>(d));
      acc += std::polar(1.0, 2.0 * kPi * r * (j - delta) / d) * weight;
    }
    jump[static_cast<size_t>(j + h)] = acc.real() / d;
  }
  Eigen::MatrixXd m(d, d);
  for (int l = -h; l <= h; ++l) {
    for (int k = -h; k <= h; ++k) {
      int j = l - k;
      if (j > h) j -= d;
      if (j < -h) j += d;
      m(l + h, k + h) = jump[static_cast<size_t>(j + h)];
    }
  }
  return m;
}

std::vector<double> jump_distribution(int d, double delta) {
  if (d < 2) throw InvalidParam("jump_distribution: d must be >= 2");
  const int lo = lowest_label(d);
  std::vector<double> out(static_cast<size_t>(d), 0.0);
  if (is_integer(delta)) {
    out[static_cast<size_t>(wrap_any(static_cast<long>(delta), d) - lo)] = 1.0;
    return out;
  }
  const double dd = static_cast<double>(d);
  for (int j = lo; j < lo + d; ++j) {
    const double x = j - delta;
    const double num = std::sin(kPi * x);
    const double den = dd * std::sin(kPi * x / dd);
    out[static_cast<size_t>(j - lo)] = num * num / (den * den);
  }
  return out;
}

std::complex<double> analytic_moment(int d, double delta, int k0, const std::vector<QueryTerm>& queries) {
  check_odd_dimension(d);
  const int h = half_width(d);
  if (std::abs(k0) > h) throw IndexOutOfRange(fmt::format("k0 = {} out of range", k0));
  const std::vector<QueryTerm> terms = canonical_queries(queries, INT_MAX);
  std::vector<int> suffix(terms.size());
  int acc = 0;
  for (size_t p = terms.size(); p-- > 0;) {
    acc += terms[p].m;
    if (std::abs(acc) > h) {
      throw InvalidQuery(fmt::format("suffix sum {} exceeds (d-1)/2 = {}", acc, h));
    }
    suffix[p] = acc;
  }
  const double dd = static_cast<double>(d);
  double phase = 0.0;
  std::complex<double> damping = 1.0;
  int previous = 0;
  for (size_t p = 0; p < terms.size(); ++p) {
    phase += terms[p].m * (k0 + delta * terms[p].index);
    const std::complex<double> factor =
        1.0 - (1.0 - std::polar(1.0, -2.0 * kPi * delta * sign_of(suffix[p]))) * (std::abs(suffix[p]) / dd);
    damping *= std::pow(factor, terms[p].index - previous);
    previous = terms[p].index;
  }
  return std::polar(1.0, 2.0 * kPi * phase / dd) * damping;
}

TimeBasisChainSampler::TimeBasisChainSampler(int d, double delta) : d_(d) {
  const std::vector<double> probs = jump_distribution(d, delta);
  cdf_.resize(probs.size());
  double acc = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf_[i] = acc;
  }
  for (auto& c : cdf_) c /= acc;
}

int TimeBasisChainSampler::step(int label, RngStream& rng) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), rng.uniform());
  const int pos = static_cast<int>(std::min<size_t>(static_cast<size_t>(it - cdf_.begin()), cdf_.size() - 1));
  return wrap_any(static_cast<long>(label) + pos + lowest_label(d_), d_);
}

std::vector<int> sample_chain(const TimeBasisChainParams& params, int steps, RngStream& rng) {
  params.validate();
  if (steps < 0) throw InvalidParam("steps must be non-negative");
  const TimeBasisChainSampler sampler(params.d, params.delta);
  std::vector<int> out;
  out.reserve(static_cast<size_t>(steps));
  int label = params.k0;
  for (int i = 0; i < steps; ++i) {
    label = sampler.step(label, rng);
    out.push_back(label);
  }
  return out;
}

std::complex<double> cauchy_limit_cf(const std::vector<double>& thetas, const std::vector<double>& times) {
  check_times(thetas, times);
  double drift = 0.0;
  double decay = 0.0;
  for (size_t k = 0; k < thetas.size(); ++k) {
    drift += thetas[k] * times[k];
    double tail = 0.0;
    for (size_t l = k; l < thetas.size(); ++l) tail += thetas[l];
    decay += std::abs(tail) * (times[k] - (k == 0 ? 0.0 : times[k - 1]));
  }
  return std::polar(std::exp(-2.0 * decay), 2.0 * kPi * drift);
}

std::complex<double> uniform_limit_cf(const std::vector<double>& thetas, const std::vector<double>& times) {
  check_times(thetas, times);
  double drift = 0.0;
  for (size_t k = 0; k < thetas.size(); ++k) drift += thetas[k] * times[k];
  return std::polar(1.0, 2.0 * kPi * drift);
}

std::vector<std::vector<EmpiricalCf>> scaled_process_cf(int p, const std::vector<double>& thetas,
                                                        const std::vector<double>& times, long chains,
                                                        std::uint64_t seed, int threads) {
  if (p < 1 || p > 12) throw InvalidParam("scaled_process_cf: p must be in [1, 12]");
  if (chains < 2) throw InvalidParam("scaled_process_cf: need at least two chains");
  for (size_t j = 0; j < times.size(); ++j) {
    if (times[j] < 0.0) throw InvalidParam("times must be non-negative");
  }
  const int d = 1 << (2 * p);
  const double root = static_cast<double>(1 << p);
  std::vector<long> steps_at(times.size());
  long max_steps = 0;
  for (size_t j = 0; j < times.size(); ++j) {
    steps_at[j] = static_cast<long>(std::floor(2.0 * times[j] * root));
    max_steps = std::max(max_steps, steps_at[j]);
  }
  const TimeBasisChainSampler sampler(d, 0.5);
  const size_t nt = thetas.size();
  const size_t ns = times.size();

  struct Partial {
    std::vector<long double> re, im, re2, im2;
  };
  constexpr long kBlock = 4096;
  const size_t n_blocks = static_cast<size_t>((chains + kBlock - 1) / kBlock);
  std::vector<Partial> partials(n_blocks);
  parallel_blocks(n_blocks, threads, [&](size_t b) {
    Partial acc{std::vector<long double>(nt * ns, 0), std::vector<long double>(nt * ns, 0),
                std::vector<long double>(nt * ns, 0), std::vector<long double>(nt * ns, 0)};
    std::vector<int> labels(ns);
    const long begin = static_cast<long>(b) * kBlock;
    const long end = std::min(chains, begin + kBlock);
    for (long c = begin; c < end; ++c) {
      RngStream rng({seed, experiment_ids::kScaledProcess, static_cast<std::uint64_t>(c)});
      int label = 0;
      long step = 0;
      // Record the label after steps_at[j] jumps for every requested time.
      std::vector<size_t> order(ns);
      for (size_t j = 0; j < ns; ++j) order[j] = j;
      std::sort(order.begin(), order.end(), [&](size_t a, size_t z) { return steps_at[a] < steps_at[z]; });
      for (size_t idx : order) {
        while (step < steps_at[idx]) {
          label = sampler.step(label, rng);
          ++step;
        }
        labels[idx] = label;
      }
      for (size_t i = 0; i < nt; ++i) {
        for (size_t j = 0; j < ns; ++j) {
          const std::complex<double> z = std::polar(1.0, 2.0 * kPi * thetas[i] * labels[j] / root);
          const size_t at = i * ns + j;
          acc.re[at] += z.real();
          acc.im[at] += z.imag();
          acc.re2[at] += static_cast<long double>(z.real()) * z.real();
          acc.im2[at] += static_cast<long double>(z.imag()) * z.imag();
        }
      }
    }
    partials[b] = std::move(acc);
  });
  (void)max_steps;
  std::vector<std::vector<EmpiricalCf>> out(nt, std::vector<EmpiricalCf>(ns));
  const long double n = static_cast<long double>(chains);
  for (size_t i = 0; i < nt; ++i) {
    for (size_t j = 0; j < ns; ++j) {
      const size_t at = i * ns + j;
      long double re = 0, im = 0, re2 = 0, im2 = 0;
      for (const auto& part : partials) {
        re += part.re[at];
        im += part.im[at];
        re2 += part.re2[at];
        im2 += part.im2[at];
      }
      const long double mre = re / n, mim = im / n;
      const long double vre = std::max<long double>(0, (re2 - n * mre * mre) / (n - 1));
      const long double vim = std::max<long double>(0, (im2 - n * mim * mim) / (n - 1));
      out[i][j].value = {static_cast<double>(mre), static_cast<double>(mim)};
      out[i][j].std_error = static_cast<double>(std::sqrt((vre + vim) / n));
    }
  }
  return out;
}

}  // namespace qclock
