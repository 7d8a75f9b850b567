#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gaussflow/functionals.hpp"
#include "gaussflow/grid.hpp"
#include "gaussflow/measure.hpp"

namespace gaussflow::stability {

/// Entropy--entropy production improvement with the convex profile phi:
/// I[f] >= (lambda_star/(2-p)^2) ||f||_p^2 phi((2-p) E[f] / ||f||_p^2).
DeficitReport improved_gap_phi(const GridFunction& f, double p,
                                  const MeasureSpec& mu);

/// The two algebraically identical right-hand sides of the same bound,
/// stated as remainders below the plain deficit: the phi form and the
/// explicit-norms form. They agree to roundoff.
std::pair<double, double> phi_remainder_forms(const GridFunction& f,
                                                 double p,
                                                 const MeasureSpec& mu);

/// Nonlinear-flow improvement with profile chi_beta, beta in [1, beta_+(p)]:
/// I[f] >= ||f||_p^2 chi_beta((2-p) E[f] / ||f||_p^2).
DeficitReport improved_gap_chi(const GridFunction& f, double p, double beta,
                               const MeasureSpec& mu);

/// Fourth-order remainder bounds. The psi report checks
///   deficit >= (lambda_star M/(2-p)^2) psi((2-p)^2 I[f]/(lambda_star M)),
/// M = ||f||_p^2, and the kappa report checks
///   deficit >= kappa I[f]^2 / (I[f] + lambda_star ||f||_2^2/(2-p)^2),
/// both as delivered by the convexity argument behind them.
std::pair<DeficitReport, DeficitReport> fourth_order_bound(
    const GridFunction& f, double p, const MeasureSpec& mu);

/// Orthogonality improvement on the Gaussian:
/// deficit >= (1/2)(2-p) ||grad (Id - Pi_1) f||_2^2.
DeficitReport orth_improvement(const GridFunction& f, double p,
                               const MeasureSpec& gamma);

/// Smallest nonzero eigenvalue of -L in the measure-weighted symmetric form:
/// dense generalized symmetric eigensolve of the discrete Rayleigh quotient.
/// Near-null spurious modes (constants, grid checkerboard) sit far below
/// lambda_star and are discarded by thresholding at lambda_star / 2.
double poincare_lambda1(const MeasureSpec& mu);

/// Checks the interpolation inequality with the improved constant
/// lambda = (2-p) lambda_1 + (p-1) lambda_star on every test function;
/// returns the report of the worst one.
DeficitReport improved_lambda_check(const MeasureSpec& mu, double p,
                            const std::vector<GridFunction>& test_set);

/// Decomposition of the stability right-hand side. The gradient split
/// residual_fisher + pi1_fisher = ||grad f||_2^2 holds by construction.
struct StabilityBreakdown {
  double p = 0.0;
  double c = 0.0;  // c_{n,p} from the documented recipe
  double deficit = 0.0;
  double residual_fisher = 0.0;
  double pi1_fisher = 0.0;
  double fisher_total = 0.0;
  double l2_sq = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  std::string to_json() const;
};

/// Full stability check: deficit >= c_{n,p} (residual_fisher +
/// pi1_fisher^2/(fisher + l2)). Nonnegative data is enforced by replacing
/// f with |f|; the gradient is taken from f itself (same magnitude a.e.).
StabilityBreakdown stability_check(const GridFunction& f, int n, double p,
                                   const MeasureSpec& gamma);

/// Numeric Gaussian tail gamma(|x| > 1/(2 eps)) against the closed
/// asymptotic c_n eps^{2-n} exp(-1/(8 eps^2)).
struct TailComparison {
  double numeric = 0.0;
  double asymptotic = 0.0;
  double relative_error = 0.0;
};
TailComparison gaussian_ball_tail(double eps, int n);

/// Which branch of the stability proof applies to f, the branch's
/// guaranteed lower bound, and whether the deficit clears it.
struct ProofProbe {
  int branch = 0;          // 1 far, 2 residual-dominated, 3 near-optimizer
  double theta = 0.0;
  double t = 0.0;
  double fisher = 0.0;
  double mean = 0.0;       // integral of f dgamma
  bool mean_window_ok = true;  // sqrt(1-theta) <= mean <= 1 (branches 2, 3)
  double eps = 0.0;        // |<y, u_f>|
  double eta = 0.0;        // gradient norm of the Pi_1 residual of u_f
  double deficit = 0.0;
  double guaranteed_bound = 0.0;
  bool bound_holds = false;
  double taylor_gap = 0.0;       // ||u_f||_p^2 minus its expansion core
  double taylor_band = 0.0;      // implied eps^4/log(1/eps) constant
};
ProofProbe proof_probes(const GridFunction& f, double p, double theta,
                        double t, const MeasureSpec& gamma);

}  // namespace gaussflow::stability
