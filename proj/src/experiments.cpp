#include "qclock/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "qclock/correlations.hpp"
#include "qclock/errors.hpp"
#include "qclock/parallel.hpp"

#ifndef QCLOCK_VERSION
#define QCLOCK_VERSION "0.0.0"
#endif

namespace qclock {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

void SweepConfig::validate() const {
  if (d_grid.empty()) throw InvalidParam("d_grid must not be empty");
  for (int d : d_grid) check_odd_dimension(d);
  if (!(sigma_m_const > 0.0) || !(width_const > 0.0)) throw InvalidParam("constants must be positive");
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParam("t must be positive");
  if (!std::isfinite(delta)) throw InvalidParam("delta must be finite");
  if (samples < 1) throw InvalidParam("samples must be >= 1");
}

SweepConfig sweep_preset(const std::string& name) {
  SweepConfig cfg;
  cfg.d_grid = kFigure1Grid;
  if (name == "fig1-top") {
    cfg.sigma_m_exponent = -0.12;
    cfg.width_exponent = -0.5;
  } else if (name == "fig1-bottom") {
    cfg.sigma_m_exponent = -0.65;
    cfg.width_exponent = 0.0;
  } else {
    throw InvalidParam(fmt::format("unknown preset '{}'", name));
  }
  return cfg;
}

SweepConfig sweep_config_from_json(const std::string& text, SweepConfig base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidParam(fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw InvalidParam("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "d_grid") base.d_grid = value.get<std::vector<int>>();
      else if (key == "sigma_m_exponent") base.sigma_m_exponent = value.get<double>();
      else if (key == "sigma_m_const") base.sigma_m_const = value.get<double>();
      else if (key == "width_exponent") base.width_exponent = value.get<double>();
      else if (key == "width_const") base.width_const = value.get<double>();
      else if (key == "t") base.t = value.get<double>();
      else if (key == "delta") base.delta = value.get<double>();
      else if (key == "samples") base.samples = value.get<long>();
      else if (key == "seed") base.seed = value.get<std::uint64_t>();
      else if (key == "exact_c3") base.exact_c3 = value.get<bool>();
      else if (key == "output_path") base.output_path = value.get<std::string>();
      else throw InvalidParam(fmt::format("unknown config field '{}'", key));
    }
  } catch (const nlohmann::json::type_error& e) {
    throw InvalidParam(fmt::format("config field has the wrong type: {}", e.what()));
  }
  base.validate();
  return base;
}

SweepConfig load_sweep_config(const std::string& path, SweepConfig base) {
  std::ifstream in(path);
  if (!in) throw InvalidParam(fmt::format("cannot open config '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return sweep_config_from_json(buffer.str(), std::move(base));
}

int figure1_measurement_count(int d, double t) {
  return static_cast<int>(std::ceil(2.0 * t * std::sqrt(static_cast<double>(d)) - 1e-12));
}

std::vector<SweepRow> run_figure1_sweep(const SweepConfig& cfg, int threads) {
  cfg.validate();
  std::vector<SweepRow> rows;
  for (int d : cfg.d_grid) {
    const double dd = static_cast<double>(d);
    CorrelationQuery query;
    query.clock = {d, cfg.width_const * std::pow(dd, cfg.width_exponent), 0};
    query.meas.sigma_m_sq = cfg.sigma_m_const * std::pow(dd, cfg.sigma_m_exponent);
    const int n = figure1_measurement_count(d, cfg.t);
    query.deltas.assign(static_cast<size_t>(n), cfg.delta);
    query.queries = {{-1, n}};

    std::complex<double> c3;
    double stderr_c3 = 0.0;
    if (cfg.exact_c3) {
      c3 = c3_transfer_matrix(query);
    } else {
      const MonteCarloEstimate mc = c3_monte_carlo(query, cfg.samples, cfg.seed, threads);
      c3 = mc.estimate;
      stderr_c3 = mc.std_error;
    }
    const FactorBreakdown f = factors_with_c3(query, c3);
    SweepRow row;
    row.d = d;
    row.sigma_m_sq = query.meas.sigma_m_sq;
    row.xi_sq = query.clock.width_sq;
    row.c1 = f.c1;
    row.c2 = f.c2;
    row.c3 = c3;
    row.c3_stderr = stderr_c3;
    row.one_minus_c1c2 = 1.0 - f.c1 * f.c2;
    row.one_minus_c1c2c3 = 1.0 - (f.c1 * f.c2 * c3).real();
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    os << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.d,
                      r.sigma_m_sq, r.xi_sq, r.c1, r.c2, r.c3.real(), r.c3.imag(), r.c3_stderr,
                      r.one_minus_c1c2, r.one_minus_c1c2c3);
  }
}

LogLogFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidParam("fit needs at least two paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw InvalidParam("fit points must be finite");
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidParam("fit needs at least two distinct x values");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

LogLogFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  std::vector<double> lx, ly;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw InvalidParam("log-log fit needs positive coordinates");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  return fit_linear(lx, ly);
}

std::vector<std::vector<EmpiricalCf>> kraus_chain_cf(const ClockParams& clock, const MeasurementParams& meas,
                                                     const std::vector<double>& thetas,
                                                     const std::vector<double>& times, long chains,
                                                     std::uint64_t seed, int threads) {
  clock.validate();
  meas.validate();
  if (chains < 2) throw InvalidParam("kraus_chain_cf: need at least two chains");
  const double root = std::sqrt(static_cast<double>(clock.d));
  std::vector<int> index(times.size());
  int max_index = 0;
  for (size_t j = 0; j < times.size(); ++j) {
    if (!(times[j] >= 0.0)) throw InvalidParam("times must be non-negative");
    index[j] = static_cast<int>(std::floor(2.0 * times[j] * root));
    max_index = std::max(max_index, index[j]);
  }
  const StateVector initial = build_quasi_ideal_state(clock);
  const OutcomeSampler sampler(clock.d, meas);
  const std::vector<double> deltas(static_cast<size_t>(max_index), 0.5);
  const size_t nt = thetas.size(), ns = times.size();

  constexpr long kBlock = 32;
  const size_t n_blocks = static_cast<size_t>((chains + kBlock - 1) / kBlock);
  std::vector<std::vector<long double>> partials(n_blocks);
  parallel_blocks(n_blocks, threads, [&](size_t b) {
    std::vector<long double> acc(4 * nt * ns, 0);
    const long begin = static_cast<long>(b) * kBlock;
    const long end = std::min(chains, begin + kBlock);
    for (long c = begin; c < end; ++c) {
      RngStream rng({seed, experiment_ids::kKrausChain, static_cast<std::uint64_t>(c)});
      const TrajectoryRecord rec = run_chain(initial, deltas, sampler, meas, rng);
      for (size_t i = 0; i < nt; ++i) {
        for (size_t j = 0; j < ns; ++j) {
          const double xi = index[j] == 0 ? 0.0 : rec.outcomes[static_cast<size_t>(index[j] - 1)];
          const std::complex<double> z = std::polar(1.0, 2.0 * kPi * thetas[i] * xi);
          const size_t at = 4 * (i * ns + j);
          acc[at] += z.real();
          acc[at + 1] += z.imag();
          acc[at + 2] += static_cast<long double>(z.real()) * z.real();
          acc[at + 3] += static_cast<long double>(z.imag()) * z.imag();
        }
      }
    }
    partials[b] = std::move(acc);
  });
  std::vector<std::vector<EmpiricalCf>> out(nt, std::vector<EmpiricalCf>(ns));
  const long double n = static_cast<long double>(chains);
  for (size_t i = 0; i < nt; ++i) {
    for (size_t j = 0; j < ns; ++j) {
      const size_t at = 4 * (i * ns + j);
      long double s[4] = {0, 0, 0, 0};
      for (const auto& p : partials) {
        for (int q = 0; q < 4; ++q) s[q] += p[at + static_cast<size_t>(q)];
      }
      const long double mre = s[0] / n, mim = s[1] / n;
      const long double var = std::max<long double>(0, (s[2] - n * mre * mre + s[3] - n * mim * mim) / (n - 1));
      out[i][j].value = {static_cast<double>(mre), static_cast<double>(mim)};
      out[i][j].std_error = static_cast<double>(std::sqrt(var / n));
    }
  }
  return out;
}

std::vector<QndDecayPoint> qnd_decay_scan(const std::vector<int>& d_grid, double t0, double t1, int k,
                                          bool periodic) {
  std::vector<QndDecayPoint> out;
  for (int d : d_grid) {
    const ClockParams params{d, std::sqrt(static_cast<double>(d)), 0};
    out.push_back({d, std::abs(qnd_commutator_element(params, t0, t1, k, periodic))});
  }
  return out;
}

std::string convention_string() {
  return "energy->time dft sign +1; evolution exp(-2 pi i n delta/d); "
         "walk offsets -suffix(m); damping exp(-2 pi i delta sign(suffix)); "
         "phase exp(+2 pi i sum m_k T_k/d); time-basis moment suffix sums";
}

std::string version_string() {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : convention_string()) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return fmt::format("{} conventions {:016x}", QCLOCK_VERSION, hash);
}

}  // namespace qclock
