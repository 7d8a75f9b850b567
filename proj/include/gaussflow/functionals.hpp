#pragma once

#include <string>
#include <utility>

#include "gaussflow/grid.hpp"
#include "gaussflow/measure.hpp"

namespace gaussflow {

/// Uniform report for a single inequality check: lhs >= rhs with
/// slack = lhs - rhs. The verdict is "borderline" whenever
/// |slack| < 1e-8 * (1 + |lhs|), the discretization noise floor at N = 1024.
struct DeficitReport {
  std::string tag;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  std::string verdict;  // holds | fails | borderline

  static DeficitReport make(std::string tag, double lhs, double rhs);
  bool holds_or_borderline() const { return verdict != "fails"; }
  std::string to_json() const;
};

/// (integral of |f|^p dmu)^(1/p). Sign-changing f is handled through |f|.
double lp_norm(const GridFunction& f, double p, const MeasureSpec& mu);

/// E[f] = (||f||_2^2 - ||f||_p^2) / (2 - p), for 1 <= p < 2.
double entropy(const GridFunction& f, double p, const MeasureSpec& mu);

/// I[f] = integral of |f'|^2 dmu.
double fisher(const GridFunction& f, const MeasureSpec& mu);

/// Report for I[f] >= lambda * E[f].
DeficitReport deficit(const GridFunction& f, double p, double lambda,
                      const MeasureSpec& mu);

/// Report for ||f'||_2^2 >= (lambda/2) * integral of f^2 log(f^2/||f||_2^2).
/// Requires f >= 0; nodes with f = 0 contribute 0 (continuous extension).
DeficitReport logsob_deficit(const GridFunction& f, const MeasureSpec& mu,
                             double lambda);

/// The p -> 2 limit of the entropy: (||f||_p^2 - ||f||_2^2)/(p - 2) tends to
/// this quantity, one half of the relative-entropy integral.
double log_entropy(const GridFunction& f, const MeasureSpec& mu);

/// Orthogonal projection onto span{1, y} in L^2 of the Gaussian measure,
/// together with the residual f - projection.
std::pair<GridFunction, GridFunction> project_pi1(const GridFunction& f,
                                                  const MeasureSpec& gamma);

}  // namespace gaussflow
