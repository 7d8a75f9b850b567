#pragma once

#include "gaussflow/grid.hpp"
#include "gaussflow/measure.hpp"

namespace gaussflow::bridge {

/// log of (d pi)^{a/2} Gamma(b - a/2) / Gamma(b), the closed form of the
/// a-dimensional radial integral of (1 + |zeta|^2/d)^{-b}. Needs 0 < a < 2b.
double log_zeta_integral(double a, double b, double d);

/// The integral itself, assembled in log space for stability at large d.
double zeta_integral(double a, double b, double d);

/// log c_d with c_d = (d pi)^{d/2} Gamma(d/2) / Gamma(d), the normalization
/// of the weight (1 + |x|^2/d)^{-d}.
double log_c_d(double d);

/// Finite-d evaluation of the three scaled integrals whose d -> infinity
/// limit is the Gaussian deficit of v.
struct BridgeEvaluation {
  double d = 0.0;
  double p = 0.0;
  double gradient_term = 0.0;
  double l2_term = 0.0;
  double lp_term = 0.0;
  double combined = 0.0;         // gradient + (lp - l2)/(2 - p)
  double gaussian_target = 0.0;  // the limiting Gaussian deficit
};

/// The weighted sphere functionals reduced to the n = 1 slice: grid
/// quadrature in y times closed-form transverse integrals. v must be
/// compactly supported inside the grid (|v| < 1e-14 at the outer 4 nodes).
BridgeEvaluation sphere_functionals(const GridFunction& v, int n, double d,
                                    double p);

/// Same finite-d quantity along a sequence p_d -> 2, compared against the
/// Gaussian log-Sobolev deficit.
BridgeEvaluation logsob_bridge(const GridFunction& v, double d, double p_d);

}  // namespace gaussflow::bridge
