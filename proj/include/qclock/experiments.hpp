#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qclock/clock.hpp"
#include "qclock/measurement.hpp"
#include "qclock/timebasis.hpp"

namespace qclock {

// Figure-1 style sweep: for each d, sigma_m^2 = sigma_m_const d^sigma_m_exponent,
// xi^2 = width_const d^width_exponent, n = ceil(2 t sqrt d) measurements
// spaced by delta, query (m, I) = (-1, n).
struct SweepConfig {
  std::vector<int> d_grid;
  double sigma_m_exponent = 0.0;
  double sigma_m_const = 1.0;
  double width_exponent = 0.0;
  double width_const = 1.0;
  double t = 1.0;
  double delta = 0.5;
  long samples = 5000;
  std::uint64_t seed = 0;
  bool exact_c3 = false;
  std::string output_path;

  void validate() const;
};

inline const std::vector<int> kFigure1Grid = {501, 707, 1001, 1415, 2001, 2829, 4001, 5657, 8001};

// "fig1-top" (sigma_m^2 ~ d^-0.12, xi^2 ~ d^-0.5) or "fig1-bottom" (sigma_m^2 ~ d^-0.65, xi^2 = 1).
SweepConfig sweep_preset(const std::string& name);

// Flat JSON object with SweepConfig field names; missing fields keep defaults.
SweepConfig sweep_config_from_json(const std::string& text, SweepConfig base = {});
SweepConfig load_sweep_config(const std::string& path, SweepConfig base = {});

struct SweepRow {
  int d = 0;
  double sigma_m_sq = 0.0;
  double xi_sq = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  std::complex<double> c3 = 0.0;
  double c3_stderr = 0.0;
  double one_minus_c1c2 = 0.0;
  double one_minus_c1c2c3 = 0.0;  // 1 - Re(c1 c2 c3)
};

int figure1_measurement_count(int d, double t);

std::vector<SweepRow> run_figure1_sweep(const SweepConfig& cfg, int threads = 1);

inline constexpr const char* kSweepCsvHeader =
    "d,sigma_m_sq,xi_sq,c1,c2,c3_re,c3_im,c3_stderr,one_minus_c1c2,one_minus_c1c2c3";
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares of y on x.
LogLogFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);
// Ordinary least squares on (ln x, ln y); every coordinate must be positive.
LogLogFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

// Empirical E[exp(2 pi i theta xi_{I(t)})] for the measured clock with
// measurements every half grid unit, I(t) = floor(2 t sqrt d) (xi_0 = 0).
// Chain c uses stream (seed, kKrausChain, c). Result [i][j] belongs to (thetas[i], times[j]).
std::vector<std::vector<EmpiricalCf>> kraus_chain_cf(const ClockParams& clock, const MeasurementParams& meas,
                                                     const std::vector<double>& thetas,
                                                     const std::vector<double>& times, long chains,
                                                     std::uint64_t seed, int threads = 1);

struct QndDecayPoint {
  int d = 0;
  double magnitude = 0.0;
};

// |<theta_k| [t(t0), t(t1)] |psi>| for xi^2 = sqrt(d), n0 = 0, over d_grid.
std::vector<QndDecayPoint> qnd_decay_scan(const std::vector<int>& d_grid, double t0, double t1, int k,
                                          bool periodic);

// Human-readable description of the resolved sign conventions and its FNV-1a hash.
std::string convention_string();
std::string version_string();

}  // namespace qclock
