#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gaussflow::atlas {

/// Critical Sobolev exponent 2d/(d-2) for d > 2.
double p_critical(double d);

/// 2# = (2d^2 + 1)/(d - 1)^2, the largest exponent reached by the linear
/// (m = 1) flow on the d-sphere.
double p_sharp(double d);

/// Admissible diffusion-exponent window [m-, m+] for the sphere flow:
/// m_pm(d,p) = (dp + 2 -+ 2 sqrt(d(p-1)(2d - (d-2)p))) / ((d+2)p).
/// Endpoints: m_pm(d,1) = 1, m_pm(d,2*) = (d-1)/d, m_+(d,2#) = 1.
std::pair<double, double> m_pm_sphere(double d, double p);

/// Large-d limit of m_pm_sphere: 1 -+ (2/p) sqrt((p-1)(2-p)).
std::pair<double, double> m_pm_gauss(double p);

/// Admissible window in the beta parametrization:
/// beta_pm(p) = (1 -+ sqrt((p-1)(2-p))) / (1 - (p-1)(2-p)).
std::pair<double, double> beta_pm(double p);

/// beta = 2 / (2 - p(1-m)) and its inverse m = 1 - 2(beta-1)/(beta p).
double beta_from_m(double p, double m);
double m_from_beta(double p, double beta);

/// kappa = beta (p-2) + 1.
double kappa_of_beta(double p, double beta);

/// delta(p, beta) = kappa(beta-1) + kappa + beta - 1 - (kappa+beta-1)^2.
/// Nonnegative exactly on [beta-, beta+]; equals (2-p)(p-1) at beta = 1.
double delta(double p, double beta);

/// theta(beta) = (p-1)^2 beta^2 / ((p-2) beta^2 + 2 beta - 1).
/// theta(1) = p-1 and theta(beta_pm) = 1.
double theta_of_beta(double p, double beta);

/// Improved interpolation constant (2-p) lambda_1 + (p-1) lambda_star.
double lambda_combined(double p, double lambda1, double lambda_star);

/// phi(s) = 1 + s - (1+s)^(p-1), convex increasing on [0, inf) with
/// phi(0) = 0, phi'(0) = 2-p.
double phi_func(double p, double s);

/// Inverse of phi on [0, inf): safeguarded Newton with bisection fallback.
double phi_inverse(double p, double t);

/// b(beta) = (delta(beta)/beta^2) (2-p)/lambda_star; the chi bound needs b < 1.
double b_of_beta(double p, double beta, double lambda_star);

/// chi_beta(s) = (1 - b)(1 + s - (1+s)^b), the remainder profile of the
/// nonlinear-flow improvement. Throws if b >= 1.
double chi_beta(double p, double beta, double lambda_star, double s);

/// psi(t) = t - (2-p) phi^{-1}(t): convex, increasing, psi(0) = psi'(0) = 0,
/// psi''(0) = (p-1)/(2-p), psi(t)/t -> p-1.
double psi_func(double p, double t);

/// kappa(p) = inf_{t>0} t^{-2} (1+t) psi(t), scanned on a log grid and then
/// refined by golden section; endpoint limits psi''(0)/2 and p-1 are included.
double kappa_const(double p, int scan_points = 601);

/// kappa_star(theta) = (1/2)(2-p) psi((2-p) theta) theta, the far-from-
/// constants branch constant. Requires 0 < theta < 1.
double kappa_star(double p, double theta);

/// Parameter choices backing the stability constant, recorded so reported
/// constants are reproducible.
struct ConstantRecipe {
  double theta = 0.5;
  double lambda = 1.0 / 32.0;
  double t = 0.0;
  double branch_far = 0.0;    // kappa_star(theta)
  double branch_mid = 0.0;    // (1/4)(2-p)(1-theta) min(t, 1)
  double branch_near = 0.0;   // (1-theta) lambda
};

/// Explicit stability constant c_{n,p} assembled as the minimum of the three
/// branch constants; the recipe is returned alongside. The value does not
/// depend on n under this recipe.
std::pair<double, ConstantRecipe> c_np(int n, double p);

struct RegionRow {
  double p;
  double m_minus;
  double m_plus;
  double beta_minus;
  double beta_plus;
};

/// Admissible-region boundary table for the d-sphere (p in [1, 2*]) or, with
/// d unset, the Gaussian region (p in [1, 2]). The beta columns carry the
/// m rows mapped through beta_from_m.
std::vector<RegionRow> region_sample(std::optional<double> d, int resolution);

}  // namespace gaussflow::atlas
