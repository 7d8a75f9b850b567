#pragma once

#include <vector>

#include "gaussflow/grid.hpp"

namespace gaussflow {

/// Log-concave probability measure Z^{-1} e^{-phi} dy on a truncated grid.
///
/// The potential must satisfy the convexity bound phi'' >= lambda_star
/// (checked with discrete second differences at construction). All fields are
/// immutable after construction; instances are safe to share across threads.
struct MeasureSpec {
  Grid1D grid;
  std::vector<double> phi;        // potential samples
  std::vector<double> phi_prime;  // discrete phi'
  std::vector<double> weight;     // e^{-phi}, unnormalized
  double lambda_star = 0.0;
  double Z = 0.0;  // trapezoid integral of e^{-phi}
  bool gaussian = false;

  double density(int i) const {
    return weight[static_cast<std::size_t>(i)] / Z;
  }
};

/// Standard Gaussian measure: phi(y) = y^2/2, lambda_star = 1.
/// Requires L >= 6 so that the neglected tail mass stays below 1e-9.
MeasureSpec build_gaussian(double half_width, int point_count);

/// Measure from arbitrary potential samples with a claimed convexity bound.
/// Rejects potentials whose discrete second derivative dips below
/// lambda_star - 1e-8 anywhere in the interior, naming the worst node.
MeasureSpec build_custom(std::vector<double> phi_values, double lambda_star,
                         const Grid1D& grid);

/// Trapezoid quadrature of f against the normalized density.
/// Accumulates symmetric node pairs together, so odd integrands on the
/// symmetric grid integrate to exactly zero.
double integrate(const GridFunction& f, const MeasureSpec& mu);

/// Same quadrature for raw value arrays (no normalization by Z).
double weighted_trapezoid(const std::vector<double>& values,
                          const std::vector<double>& weight, double dy);

/// Generalized Ornstein-Uhlenbeck operator L f = f'' - phi' f'.
GridFunction apply_OU(const GridFunction& f, const MeasureSpec& mu);

}  // namespace gaussflow
