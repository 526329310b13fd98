#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "qclock/errors.hpp"
#include "qclock/experiments.hpp"

using namespace qclock;

namespace {

SweepConfig small_sweep() {
  SweepConfig cfg = sweep_preset("fig1-top");
  cfg.d_grid = {51, 101};
  cfg.samples = 400;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST(SweepPreset, KnownPresets) {
  const SweepConfig top = sweep_preset("fig1-top");
  EXPECT_EQ(top.d_grid, kFigure1Grid);
  EXPECT_DOUBLE_EQ(top.sigma_m_exponent, -0.12);
  EXPECT_DOUBLE_EQ(top.width_exponent, -0.5);
  const SweepConfig bottom = sweep_preset("fig1-bottom");
  EXPECT_DOUBLE_EQ(bottom.sigma_m_exponent, -0.65);
  EXPECT_DOUBLE_EQ(bottom.width_exponent, 0.0);
  EXPECT_THROW(sweep_preset("fig2"), InvalidParam);
}

TEST(SweepConfigJson, OverridesAndErrors) {
  const SweepConfig cfg =
      sweep_config_from_json(R"({"d_grid": [11, 21], "t": 0.5, "exact_c3": true, "seed": 9})", sweep_preset("fig1-top"));
  EXPECT_EQ(cfg.d_grid, (std::vector<int>{11, 21}));
  EXPECT_DOUBLE_EQ(cfg.t, 0.5);
  EXPECT_TRUE(cfg.exact_c3);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_DOUBLE_EQ(cfg.sigma_m_exponent, -0.12);
  EXPECT_THROW(sweep_config_from_json("{"), InvalidParam);
  EXPECT_THROW(sweep_config_from_json("[1, 2]"), InvalidParam);
  EXPECT_THROW(sweep_config_from_json(R"({"bogus": 1})"), InvalidParam);
  EXPECT_THROW(sweep_config_from_json(R"({"t": "long"})"), InvalidParam);
  EXPECT_THROW(load_sweep_config("/nonexistent/config.json"), InvalidParam);
}

TEST(SweepConfigJson, LoadsFromFile) {
  const std::string path = ::testing::TempDir() + "qclock_sweep.json";
  {
    std::ofstream out(path);
    out << R"({"samples": 77, "delta": 0.25})";
  }
  const SweepConfig cfg = load_sweep_config(path, sweep_preset("fig1-bottom"));
  EXPECT_EQ(cfg.samples, 77);
  EXPECT_DOUBLE_EQ(cfg.delta, 0.25);
  std::remove(path.c_str());
}

TEST(Fits, RecoverExactLines) {
  const LogLogFit line = fit_linear({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 2.0, 3.0});
  EXPECT_NEAR(line.slope, 1.0, 1e-14);
  EXPECT_NEAR(line.intercept, 0.0, 1e-14);
  EXPECT_NEAR(line.r_squared, 1.0, 1e-14);
  std::vector<std::pair<double, double>> points;
  for (double x : {1.0, 4.0, 9.0, 100.0}) points.emplace_back(x, 7.0 / std::sqrt(x));
  const LogLogFit power = fit_loglog_slope(points);
  EXPECT_NEAR(power.slope, -0.5, 1e-13);
  EXPECT_NEAR(std::exp(power.intercept), 7.0, 1e-12);
  EXPECT_THROW(fit_linear({1.0}, {1.0}), InvalidParam);
  EXPECT_THROW(fit_linear({1.0, 1.0}, {1.0, 2.0}), InvalidParam);
  EXPECT_THROW(fit_loglog_slope({{1.0, 1.0}, {2.0, -1.0}}), InvalidParam);
}

TEST(Figure1Sweep, MeasurementCount) {
  EXPECT_EQ(figure1_measurement_count(100, 1.0), 20);
  EXPECT_EQ(figure1_measurement_count(101, 1.0), 21);
  EXPECT_EQ(figure1_measurement_count(501, 0.5), 23);
}

TEST(Figure1Sweep, RowsAreConsistent) {
  SweepConfig cfg = small_sweep();
  const auto mc = run_figure1_sweep(cfg);
  cfg.exact_c3 = true;
  const auto exact = run_figure1_sweep(cfg);
  ASSERT_EQ(mc.size(), 2u);
  for (size_t i = 0; i < mc.size(); ++i) {
    const auto& r = mc[i];
    EXPECT_NEAR(r.sigma_m_sq, std::pow(r.d, -0.12), 1e-12);
    EXPECT_NEAR(r.xi_sq, std::pow(r.d, -0.5), 1e-12);
    EXPECT_NEAR(r.one_minus_c1c2, 1 - r.c1 * r.c2, 1e-15);
    EXPECT_NEAR(r.one_minus_c1c2c3, 1 - (r.c1 * r.c2 * r.c3).real(), 1e-15);
    EXPECT_GT(r.c3_stderr, 0.0);
    EXPECT_EQ(exact[i].c3_stderr, 0.0);
    EXPECT_LT(std::abs(r.c3 - exact[i].c3), 4 * r.c3_stderr) << r.d;
  }
}

TEST(Figure1Sweep, CsvIsReproducible) {
  const SweepConfig cfg = small_sweep();
  std::ostringstream a, b;
  write_sweep_csv(a, run_figure1_sweep(cfg, 1));
  write_sweep_csv(b, run_figure1_sweep(cfg, 2));
  const std::string text = a.str();
  EXPECT_EQ(text, b.str());
  EXPECT_EQ(text.substr(0, text.find('\n')), kSweepCsvHeader);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

TEST(KrausChainCf, ZeroThetaAndThreadIndependence) {
  const ClockParams clock{101, 1.0, 0};
  MeasurementParams meas;
  meas.sigma_m_sq = 0.3;
  const auto a = kraus_chain_cf(clock, meas, {0.0, 1.0}, {0.0, 0.4}, 64, 3, 1);
  const auto b = kraus_chain_cf(clock, meas, {0.0, 1.0}, {0.0, 0.4}, 64, 3, 2);
  EXPECT_NEAR(std::abs(a[0][1].value - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(a[1][0].value - 1.0), 0.0, 1e-12);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) EXPECT_EQ(a[i][j].value, b[i][j].value);
  }
  EXPECT_THROW(kraus_chain_cf(clock, meas, {1.0}, {-0.1}, 64, 3), InvalidParam);
}

TEST(QndDecay, LinearCommutatorShrinksWithDimension) {
  const auto points = qnd_decay_scan({11, 21, 41}, 0.0, 0.5, 0, false);
  ASSERT_EQ(points.size(), 3u);
  EXPECT_GT(points[0].magnitude, points[1].magnitude);
  EXPECT_GT(points[1].magnitude, points[2].magnitude);
}

TEST(Version, CarriesConventionHash) {
  const std::string v = version_string();
  EXPECT_EQ(v.rfind(QCLOCK_TEST_VERSION, 0), 0u) << v;
  EXPECT_NE(v.find("conventions "), std::string::npos);
  EXPECT_EQ(v.size() - v.find("conventions ") - 12, 16u);
  EXPECT_FALSE(convention_string().empty());
}
