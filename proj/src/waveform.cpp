#include "qclock/waveform.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "qclock/correlations.hpp"
#include "qclock/errors.hpp"
#include "qclock/parallel.hpp"

namespace qclock {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

void WaveformExperimentConfig::validate() const {
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw InvalidParam("noise_sigma must be >= 0");
  if (!(gamma >= 0.0 && gamma <= 0.5)) throw InvalidParam("gamma must lie in [0, 1/2]");
  if (n_measurements < 2) throw InvalidParam("n_measurements must be >= 2");
  clock.validate();
  meas.validate();
  if (!(meas.sigma_m_sq > 0.0)) throw InvalidParam("waveform trials need sigma_m_sq > 0");
}

double WaveformExperimentConfig::spacing() const { return std::pow(static_cast<double>(clock.d), 0.5 - gamma); }

double effective_damping_constant(double noise_sigma) {
  if (!(noise_sigma >= 0.0)) throw InvalidParam("noise_sigma must be >= 0");
  return 1.0 - std::exp(-2.0 * kPi * noise_sigma * noise_sigma);
}

double gaussian_damping_average(double noise_sigma) {
  if (!(noise_sigma >= 0.0)) throw InvalidParam("noise_sigma must be >= 0");
  return 1.0 - std::exp(-2.0 * kPi * kPi * noise_sigma * noise_sigma);
}

DampingAverageEstimate sample_damping_average(double noise_sigma, long draws, std::uint64_t seed) {
  if (!(noise_sigma >= 0.0)) throw InvalidParam("noise_sigma must be >= 0");
  if (draws < 2) throw InvalidParam("need at least two draws");
  RngStream rng({seed, experiment_ids::kDampingAverage, 0});
  long double re = 0, im = 0, re2 = 0, im2 = 0;
  for (long i = 0; i < draws; ++i) {
    const double delta = 1.0 + noise_sigma * rng.normal();
    const std::complex<double> z = 1.0 - std::polar(1.0, -2.0 * kPi * delta);
    re += z.real();
    im += z.imag();
    re2 += static_cast<long double>(z.real()) * z.real();
    im2 += static_cast<long double>(z.imag()) * z.imag();
  }
  const long double n = static_cast<long double>(draws);
  const long double mre = re / n, mim = im / n;
  const long double var = (re2 - n * mre * mre + im2 - n * mim * mim) / (n - 1);
  return {{static_cast<double>(mre), static_cast<double>(mim)},
          static_cast<double>(std::sqrt(std::max<long double>(0, var) / n))};
}

WaveformRunner::WaveformRunner(const WaveformExperimentConfig& cfg, const ThetaEvalConfig& theta_cfg)
    : cfg_((cfg.validate(), cfg)),
      initial_(build_quasi_ideal_state(cfg.clock, theta_cfg)),
      sampler_(cfg.clock.d, cfg.meas, theta_cfg) {}

WaveformTrial WaveformRunner::trial(RngStream& rng) const {
  const int n = cfg_.n_measurements;
  const double spacing = cfg_.spacing();
  const double noise_scale = cfg_.noise_sigma * std::sqrt(spacing);
  std::vector<double> noise(static_cast<size_t>(n));
  std::vector<double> deltas(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    noise[static_cast<size_t>(j)] = noise_scale * rng.normal();
    deltas[static_cast<size_t>(j)] = spacing + noise[static_cast<size_t>(j)];
  }
  const TrajectoryRecord record = run_chain(initial_, deltas, sampler_, cfg_.meas, rng);
  const double root = std::sqrt(static_cast<double>(cfg_.clock.d));
  WaveformTrial out;
  for (int j = 1; j < n; ++j) {
    const double inc = record.outcomes[static_cast<size_t>(j)] - record.outcomes[static_cast<size_t>(j - 1)];
    out.truth.push_back(noise[static_cast<size_t>(j)]);
    out.estimates.push_back(root * unwrap_increment(inc, cfg_.clock.d) - spacing);
  }
  return out;
}

WaveformTrial run_waveform_trial(const WaveformExperimentConfig& cfg, RngStream& rng) {
  return WaveformRunner(cfg).trial(rng);
}

WaveformErrorStats waveform_error_stats(const WaveformExperimentConfig& cfg, long trials, int threads) {
  if (trials < 1) throw InvalidParam("trials must be >= 1");
  const WaveformRunner runner(cfg);
  constexpr long kBlock = 64;
  const size_t n_blocks = static_cast<size_t>((trials + kBlock - 1) / kBlock);
  struct Partial {
    long count = 0;
    long double sum = 0, sum_sq = 0;
  };
  std::vector<Partial> partials(n_blocks);
  parallel_blocks(n_blocks, threads, [&](size_t b) {
    Partial acc;
    const long begin = static_cast<long>(b) * kBlock;
    const long end = std::min(trials, begin + kBlock);
    for (long i = begin; i < end; ++i) {
      RngStream rng({cfg.seed, experiment_ids::kWaveform, static_cast<std::uint64_t>(i)});
      const WaveformTrial t = runner.trial(rng);
      for (size_t k = 0; k < t.truth.size(); ++k) {
        const long double e = t.estimates[k] - t.truth[k];
        acc.sum += e;
        acc.sum_sq += e * e;
        ++acc.count;
      }
    }
    partials[b] = acc;
  });
  Partial total;
  for (const auto& p : partials) {
    total.count += p.count;
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
  }
  WaveformErrorStats stats;
  stats.count = total.count;
  const long double n = static_cast<long double>(total.count);
  const long double mean = total.sum / n;
  stats.mean_error = static_cast<double>(mean);
  if (total.count > 1) {
    const long double var = std::max<long double>(0, (total.sum_sq - n * mean * mean) / (n - 1));
    stats.error_stdev = static_cast<double>(std::sqrt(var));
    stats.mean_error_stderr = static_cast<double>(std::sqrt(var / n));
  }
  return stats;
}

double increment_variance_prediction(const WaveformExperimentConfig& cfg, int j) {
  cfg.validate();
  if (j < 2 || j > cfg.n_measurements) {
    throw IndexOutOfRange(fmt::format("increment index {} outside [2, {}]", j, cfg.n_measurements));
  }
  CorrelationQuery query;
  query.clock = cfg.clock;
  query.meas = cfg.meas;
  query.deltas.assign(static_cast<size_t>(j), cfg.spacing());
  query.queries = {{-1, j - 1}, {1, j}};
  const double modulus = std::abs(factors_exact(query).product);
  if (!(modulus > 0.0)) throw NonConvergent("pseudo-correlation vanished; variance undefined");
  const double d = static_cast<double>(cfg.clock.d);
  return -d * d * std::log(modulus) / (2.0 * kPi * kPi);
}

double detectability_threshold(double d, double gamma) {
  if (!(d > 0.0)) throw InvalidParam("d must be positive");
  return std::pow(d, 1.5 * gamma - 0.5);
}

}  // namespace qclock
