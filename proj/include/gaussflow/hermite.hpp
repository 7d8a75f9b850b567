#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "gaussflow/grid.hpp"

namespace gaussflow {

/// Probabilist Hermite polynomial He_k(y).
inline double hermite(int k, double y) {
  double h0 = 1.0, h1 = y;
  if (k == 0) return h0;
  if (k == 1) return h1;
  for (int j = 2; j <= k; ++j) {
    const double h2 = y * h1 - static_cast<double>(j - 1) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

/// He_k normalized to unit L^2(gamma) norm.
inline double hermite_normalized(int k, double y) {
  double fact = 1.0;
  for (int j = 2; j <= k; ++j) fact *= static_cast<double>(j);
  return hermite(k, y) / std::sqrt(fact);
}

/// Truncated Hermite series 1 + sum a_k he_k, degree <= max_degree,
/// coefficients uniform in [-coef_bound, coef_bound]. With clip_positive the
/// values are floored at zero (the stability sweeps need f >= 0).
inline GridFunction random_hermite_function(const Grid1D& grid,
                                            std::mt19937_64& rng,
                                            int max_degree = 8,
                                            double coef_bound = 0.3,
                                            bool clip_positive = false) {
  std::uniform_real_distribution<double> u(-coef_bound, coef_bound);
  std::vector<double> coef(static_cast<std::size_t>(max_degree) + 1, 0.0);
  for (int k = 1; k <= max_degree; ++k) coef[static_cast<std::size_t>(k)] = u(rng);
  GridFunction f = GridFunction::sample(grid, [&](double y) {
    double v = 1.0;
    for (int k = 1; k <= max_degree; ++k)
      v += coef[static_cast<std::size_t>(k)] * hermite_normalized(k, y);
    return v;
  });
  if (clip_positive)
    for (double& v : f.values)
      if (v < 0.0) v = 0.0;
  return f;
}

/// Smooth positive bump-series datum 1 + sum a_k He_k(y) exp(-y^2/4),
/// bounded away from zero; suitable as nonlinear-flow initial data.
inline GridFunction random_flow_datum(const Grid1D& grid, std::mt19937_64& rng,
                                      double amplitude = 0.08,
                                      int max_degree = 5) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  std::vector<double> coef(static_cast<std::size_t>(max_degree) + 1, 0.0);
  for (int k = 2; k <= max_degree; ++k) coef[static_cast<std::size_t>(k)] = u(rng);
  return GridFunction::sample(grid, [&](double y) {
    double v = 1.0;
    const double bump = std::exp(-0.25 * y * y);
    for (int k = 2; k <= max_degree; ++k)
      v += coef[static_cast<std::size_t>(k)] * hermite(k, y) * bump;
    return v;
  });
}

}  // namespace gaussflow
