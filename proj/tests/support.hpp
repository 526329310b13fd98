#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qclock/measurement.hpp"

namespace qclock::test_support {

// Largest deviation from 1 of int Omega_k(xi)^2 dxi over [-sqrt(d)/2, sqrt(d)/2],
// over all labels k. Adaptive Gauss-Kronrod on panels narrower than the bump.
inline double povm_completeness_residual(int d, double sigma_m_sq) {
  MeasurementParams params;
  params.sigma_m_sq = sigma_m_sq;
  const double half = 0.5 * std::sqrt(static_cast<double>(d));
  const double panel = std::min(0.25, std::sqrt(sigma_m_sq) / 4.0);
  const int panels = static_cast<int>(std::ceil(2.0 * half / panel));
  const double width = 2.0 * half / panels;
  double worst = 0.0;
  const int h = (d - 1) / 2;
  for (int k = -h; k <= h; ++k) {
    auto f = [&](double xi) {
      const double w = kraus_diag(std::clamp(xi, -half, half), d, params)[static_cast<size_t>(k + h)];
      return w * w;
    };
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double a = -half + p * width;
      total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, a + width, 8, 1e-14);
    }
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return worst;
}

}  // namespace qclock::test_support
