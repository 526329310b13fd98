#include "qclock/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "qclock/correlations.hpp"
#include "qclock/errors.hpp"
#include "qclock/experiments.hpp"
#include "qclock/oscillator.hpp"
#include "qclock/timebasis.hpp"
#include "qclock/waveform.hpp"

namespace qclock {

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string config;
  std::string out;
  double tol = 1e-8;
};

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InvalidParam(fmt::format("cannot open output '{}'", path));
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParam(fmt::format("cannot open '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int run_sweep(const GlobalOptions& g, const std::string& preset, bool exact, long samples) {
  SweepConfig cfg = sweep_preset(preset);
  cfg.seed = g.seed;
  if (samples > 0) cfg.samples = samples;
  cfg.exact_c3 = exact;
  if (!g.config.empty()) cfg = load_sweep_config(g.config, cfg);
  const auto rows = run_figure1_sweep(cfg, g.threads);
  std::string path = g.out.empty() ? cfg.output_path : g.out;
  Output out(path);
  write_sweep_csv(out.stream(), rows);
  return 0;
}

CorrelationQuery query_from_json(const nlohmann::json& j) {
  CorrelationQuery q;
  try {
    q.clock.d = j.at("d").get<int>();
    q.clock.width_sq = j.value("xi_sq", 1.0);
    q.clock.n0 = j.value("n0", 0);
    q.meas.sigma_m_sq = j.value("sigma_m_sq", 1.0);
    q.deltas = j.at("deltas").get<std::vector<double>>();
    for (const auto& term : j.at("queries")) {
      q.queries.push_back({term.at(0).get<int>(), term.at(1).get<int>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParam(fmt::format("bad correlate config: {}", e.what()));
  }
  return q;
}

int run_correlate(const GlobalOptions& g) {
  if (g.config.empty()) throw InvalidParam("correlate needs --config <query.json>");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(g.config));
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidParam(fmt::format("config is not valid JSON: {}", e.what()));
  }
  const CorrelationQuery q = query_from_json(j);
  const FactorBreakdown f = factors_exact(q);
  nlohmann::json res = {
      {"phase", {f.phase.real(), f.phase.imag()}},
      {"c1", f.c1},
      {"c2", f.c2},
      {"c3", {f.c3.real(), f.c3.imag()}},
      {"product", {f.product.real(), f.product.imag()}},
  };
  if (q.clock.d <= kOracleDimensionCap) {
    const auto oracle = oracle_moment(q.clock, q.deltas, q.meas, q.queries);
    res["oracle"] = {oracle.real(), oracle.imag()};
  }
  Output out(g.out);
  out.stream() << res.dump(2) << '\n';
  return 0;
}

int run_chain_cmd(const GlobalOptions& g, const ClockParams& clock, double sigma_m_sq, double delta, int steps) {
  MeasurementParams meas;
  meas.sigma_m_sq = sigma_m_sq;
  meas.validate();
  if (steps < 1) throw InvalidParam("steps must be >= 1");
  RngStream rng({g.seed, experiment_ids::kKrausChain, 0});
  const StateVector initial = build_quasi_ideal_state(clock);
  const auto record =
      run_chain(initial, std::vector<double>(static_cast<size_t>(steps), delta), meas, clock.d, rng);
  Output out(g.out);
  record.write_csv(out.stream());
  return 0;
}

int run_oracle_check(const GlobalOptions& g) {
  double worst = 0.0;
  long cases = 0;
  for (int d : {3, 5, 11}) {
    for (double delta : {0.5, 0.3, 1.0}) {
      for (double s : {0.05, 5.0}) {
        for (double xi : {0.2, 5.0}) {
          for (int n0 : {0, 2}) {
            if (n0 > (d - 1) / 2) continue;
            for (int J : {1, 3}) {
              for (int m = -2; m <= 2; ++m) {
                const int outer_suffix = J > 1 ? m + 1 : m;
                if (std::abs(m) >= d || std::abs(outer_suffix) >= d) continue;
                CorrelationQuery q;
                q.clock = {d, xi, n0};
                q.meas.sigma_m_sq = s;
                q.deltas.assign(static_cast<size_t>(J), delta);
                q.queries = {{m, J}};
                if (J > 1) q.queries.push_back({1, 1});
                const auto exact = factors_exact(q).product;
                const auto oracle = oracle_moment(q.clock, q.deltas, q.meas, q.queries);
                worst = std::max(worst, std::abs(exact - oracle));
                ++cases;
              }
            }
          }
        }
      }
    }
  }
  Output out(g.out);
  out.stream() << fmt::format("cases {} max_abs_deviation {:.3e} tol {:.1e}\n", cases, worst, g.tol);
  return worst < g.tol ? 0 : 1;
}

int run_oscillator(const GlobalOptions& g, int center_index) {
  Output out(g.out);
  out.stream() << "tau,sigma_sq_opt,min_variance,floor\n";
  for (double tau : {0.02, 0.05, 0.1, 0.2, 0.5, 1.0}) {
    ForceEstimatorSpec spec;
    spec.tau = tau;
    spec.center_index = center_index;
    double best = INFINITY, best_s2 = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double s2 = std::pow(10.0, -4.0 + 8.0 * i / 400.0) * tau;
      const double v = fd_estimator_variance(spec, std::sqrt(s2));
      if (v < best) {
        best = v;
        best_s2 = s2;
      }
    }
    out.stream() << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", tau, best_s2, best, fd_variance_floor(tau));
  }
  return 0;
}

int run_waveform(const GlobalOptions& g, WaveformExperimentConfig cfg, long trials) {
  cfg.seed = g.seed;
  const WaveformErrorStats stats = waveform_error_stats(cfg, trials, g.threads);
  Output out(g.out);
  out.stream() << "d,sigma_m_sq,noise_sigma,gamma,increments,mean_error,mean_error_stderr,error_stdev\n";
  out.stream() << fmt::format("{},{:.17g},{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g}\n", cfg.clock.d,
                              cfg.meas.sigma_m_sq, cfg.noise_sigma, cfg.gamma, stats.count, stats.mean_error,
                              stats.mean_error_stderr, stats.error_stdev);
  return 0;
}

int run_timebasis(const GlobalOptions& g, int d, double delta, long chains, int i1, int i2) {
  const TimeBasisChainParams params{d, delta, 0};
  params.validate();
  if (i1 < 1 || i2 <= i1) throw InvalidParam("need 1 <= i1 < i2");
  const std::vector<QueryTerm> queries = {{-1, i1}, {1, i2}};
  const auto analytic = analytic_moment(d, delta, 0, queries);
  long double re = 0, im = 0;
  for (long c = 0; c < chains; ++c) {
    RngStream rng({g.seed, experiment_ids::kTimeBasisChain, static_cast<std::uint64_t>(c)});
    const auto labels = sample_chain(params, i2, rng);
    const double phase = 2.0 * std::numbers::pi *
                         (-labels[static_cast<size_t>(i1 - 1)] + labels[static_cast<size_t>(i2 - 1)]) / d;
    re += std::cos(phase);
    im += std::sin(phase);
  }
  Output out(g.out);
  out.stream() << fmt::format("analytic {:.10f}{:+.10f}i empirical {:.10f}{:+.10f}i chains {}\n", analytic.real(),
                              analytic.imag(), static_cast<double>(re / chains),
                              static_cast<double>(im / chains), chains);
  return 0;
}

int run_qnd(const GlobalOptions& g, bool periodic, double t0, double t1, int k) {
  const auto points = qnd_decay_scan({11, 21, 41, 81, 161}, t0, t1, k, periodic);
  Output out(g.out);
  out.stream() << "d,magnitude\n";
  for (const auto& p : points) out.stream() << fmt::format("{},{:.17g}\n", p.d, p.magnitude);
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Measured quasi-ideal clock simulator"};
  app.set_version_flag("--version", version_string());
  GlobalOptions g;
  app.add_option("--seed", g.seed, "Master RNG seed");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--out", g.out, "Output path (default stdout)");
  app.add_option("--tol", g.tol, "Tolerance for checks");
  app.require_subcommand(1);

  std::string preset = "fig1-top";
  bool exact = false;
  long samples = 0;
  auto* sweep = app.add_subcommand("sweep", "Figure-1 scaling sweep to CSV");
  sweep->add_option("--preset", preset, "fig1-top or fig1-bottom");
  sweep->add_flag("--exact-c3", exact, "Use the transfer matrix instead of Monte Carlo");
  sweep->add_option("--samples", samples, "Monte-Carlo samples per point");

  auto* correlate = app.add_subcommand("correlate", "Factor breakdown of one query (JSON in, JSON out)");

  ClockParams clock{101, 1.0, 0};
  double sigma_m_sq = 1.0, delta = 0.5;
  int steps = 20;
  auto* chain = app.add_subcommand("chain", "Simulate a measurement trajectory to CSV");
  chain->add_option("--d", clock.d);
  chain->add_option("--xi-sq", clock.width_sq);
  chain->add_option("--n0", clock.n0);
  chain->add_option("--sigma-m-sq", sigma_m_sq);
  chain->add_option("--delta", delta);
  chain->add_option("--steps", steps);

  auto* oracle = app.add_subcommand("oracle-check", "Closed form vs density-matrix oracle");

  int center_index = 2;
  auto* osc = app.add_subcommand("oscillator", "Force-estimator variance floor scan");
  osc->add_option("--center-index", center_index);

  WaveformExperimentConfig wcfg;
  wcfg.clock = {501, 1.0, 0};
  wcfg.meas.sigma_m_sq = 0.1;
  long trials = 200;
  auto* wave = app.add_subcommand("waveform", "White-noise waveform estimation error");
  wave->add_option("--d", wcfg.clock.d);
  wave->add_option("--xi-sq", wcfg.clock.width_sq);
  wave->add_option("--sigma-m-sq", wcfg.meas.sigma_m_sq);
  wave->add_option("--noise-sigma", wcfg.noise_sigma);
  wave->add_option("--gamma", wcfg.gamma);
  wave->add_option("--measurements", wcfg.n_measurements);
  wave->add_option("--trials", trials);

  int tb_d = 101, i1 = 3, i2 = 8;
  double tb_delta = 0.5;
  long chains = 100000;
  auto* tb = app.add_subcommand("timebasis", "Sharp-measurement chain vs closed-form moment");
  tb->add_option("--d", tb_d);
  tb->add_option("--delta", tb_delta);
  tb->add_option("--chains", chains);
  tb->add_option("--i1", i1);
  tb->add_option("--i2", i2);

  bool periodic = false;
  double t0 = 0.0, t1 = 0.5;
  int qnd_label = 0;
  auto* qnd = app.add_subcommand("qnd-decay", "Commutator magnitude vs d");
  qnd->add_flag("--periodic", periodic);
  qnd->add_option("--t0", t0);
  qnd->add_option("--t1", t1);
  qnd->add_option("--k", qnd_label, "Time label of the matrix element");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    if (*sweep) return run_sweep(g, preset, exact, samples);
    if (*correlate) return run_correlate(g);
    if (*chain) return run_chain_cmd(g, clock, sigma_m_sq, delta, steps);
    if (*oracle) return run_oracle_check(g);
    if (*osc) return run_oscillator(g, center_index);
    if (*wave) return run_waveform(g, wcfg, trials);
    if (*tb) return run_timebasis(g, tb_d, tb_delta, chains, i1, i2);
    if (*qnd) return run_qnd(g, periodic, t0, t1, qnd_label);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace qclock
