#include "gaussflow/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gaussflow::atlas {

namespace {

void require_p_window(double p, double lo, double hi, const char* where) {
  if (!(p >= lo) || !(p <= hi)) {
    std::ostringstream msg;
    msg << where << ": p=" << p << " outside [" << lo << ", " << hi << "]";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

double p_critical(double d) {
  if (!(d > 2.0))
    throw std::invalid_argument("p_critical: requires d > 2");
  return 2.0 * d / (d - 2.0);
}

double p_sharp(double d) {
  if (!(d > 1.0)) throw std::invalid_argument("p_sharp: requires d > 1");
  return (2.0 * d * d + 1.0) / ((d - 1.0) * (d - 1.0));
}

std::pair<double, double> m_pm_sphere(double d, double p) {
  if (!(d >= 1.0)) throw std::invalid_argument("m_pm_sphere: d must be >= 1");
  if (!(p >= 1.0)) throw std::invalid_argument("m_pm_sphere: p must be >= 1");
  double disc = d * (p - 1.0) * (2.0 * d - (d - 2.0) * p);
  // Absorb roundoff at the double root p = 2*.
  if (disc < 0.0 && disc > -1e-10 * d * d * p * p) disc = 0.0;
  if (disc < 0.0)
    throw std::invalid_argument("m_pm_sphere: negative discriminant");
  const double root = 2.0 * std::sqrt(disc);
  const double den = (d + 2.0) * p;
  return {(d * p + 2.0 - root) / den, (d * p + 2.0 + root) / den};
}

std::pair<double, double> m_pm_gauss(double p) {
  require_p_window(p, 1.0, 2.0, "m_pm_gauss");
  const double root = (2.0 / p) * std::sqrt((p - 1.0) * (2.0 - p));
  return {1.0 - root, 1.0 + root};
}

std::pair<double, double> beta_pm(double p) {
  require_p_window(p, 1.0, 2.0 - 1e-15, "beta_pm");
  const double s2 = (p - 1.0) * (2.0 - p);
  const double root = std::sqrt(s2);
  return {(1.0 - root) / (1.0 - s2), (1.0 + root) / (1.0 - s2)};
}

double beta_from_m(double p, double m) {
  const double den = 2.0 - p * (1.0 - m);
  if (den == 0.0)
    throw std::invalid_argument("beta_from_m: parameters hit the pole");
  return 2.0 / den;
}

double m_from_beta(double p, double beta) {
  if (beta == 0.0 || p == 0.0)
    throw std::invalid_argument("m_from_beta: degenerate parameters");
  return 1.0 - 2.0 * (beta - 1.0) / (beta * p);
}

double kappa_of_beta(double p, double beta) { return beta * (p - 2.0) + 1.0; }

double delta(double p, double beta) {
  const double kappa = kappa_of_beta(p, beta);
  const double a = kappa + beta - 1.0;
  return kappa * (beta - 1.0) + a - a * a;
}

double theta_of_beta(double p, double beta) {
  const double den = (p - 2.0) * beta * beta + 2.0 * beta - 1.0;
  if (std::abs(den) < 1e-14)
    throw std::invalid_argument("theta_of_beta: evaluated at the pole");
  const double num = (p - 1.0) * (p - 1.0) * beta * beta;
  return num / den;
}

double lambda_combined(double p, double lambda1, double lambda_star) {
  if (!(lambda_star > 0.0) || lambda1 < lambda_star - 1e-12)
    throw std::invalid_argument(
        "lambda_combined: need lambda1 >= lambda_star > 0");
  return (2.0 - p) * lambda1 + (p - 1.0) * lambda_star;
}

double phi_func(double p, double s) {
  if (s < 0.0) throw std::invalid_argument("phi_func: s must be >= 0");
  // s - ((1+s)^{p-1} - 1) through expm1 to keep accuracy near s = 0.
  return s - std::expm1((p - 1.0) * std::log1p(s));
}

namespace {

// psi evaluated at t = phi(s): (p-1)s - ((1+s)^{p-1} - 1), cancellation-free.
double psi_of_s(double p, double s) {
  return (p - 1.0) * s - std::expm1((p - 1.0) * std::log1p(s));
}

}  // namespace

double phi_inverse(double p, double t) {
  require_p_window(p, 1.0 + 1e-12, 2.0 - 1e-12, "phi_inverse");
  if (t < 0.0) throw std::invalid_argument("phi_inverse: t must be >= 0");
  if (t == 0.0) return 0.0;

  // phi(s) >= (2-p)s gives a guaranteed bracket [0, t/(2-p)].
  double lo = 0.0;
  double hi = t / (2.0 - p);
  while (phi_func(p, hi) < t) hi *= 2.0;  // paranoia; cannot trigger

  double s = hi;
  const double tol = 1e-15 * t;
  for (int it = 0; it < 200; ++it) {
    const double val = phi_func(p, s) - t;
    if (std::abs(val) <= tol) return s;
    if (val > 0.0)
      hi = s;
    else
      lo = s;
    const double deriv = 1.0 - (p - 1.0) * std::pow(1.0 + s, p - 2.0);
    double next = s - val / deriv;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    if (next == s) return s;
    s = next;
    if (hi - lo <= 1e-16 * (1.0 + hi)) return 0.5 * (lo + hi);
  }
  std::ostringstream msg;
  msg << "phi_inverse: no convergence for t=" << t << " (bracket [" << lo
      << ", " << hi << "])";
  throw std::runtime_error(msg.str());
}

double b_of_beta(double p, double beta, double lambda_star) {
  if (!(lambda_star > 0.0))
    throw std::invalid_argument("b_of_beta: lambda_star must be positive");
  return delta(p, beta) / (beta * beta) * (2.0 - p) / lambda_star;
}

double chi_beta(double p, double beta, double lambda_star, double s) {
  const double b = b_of_beta(p, beta, lambda_star);
  if (b >= 1.0)
    throw std::invalid_argument("chi_beta: b >= 1, profile not monotone");
  if (s < 0.0) throw std::invalid_argument("chi_beta: s must be >= 0");
  return (1.0 - b) * (1.0 + s - std::pow(1.0 + s, b));
}

double psi_func(double p, double t) {
  return psi_of_s(p, phi_inverse(p, t));
}

double kappa_star(double p, double theta) {
  if (!(theta > 0.0) || !(theta < 1.0))
    throw std::invalid_argument("kappa_star: need theta in (0,1)");
  return 0.5 * (2.0 - p) * psi_func(p, (2.0 - p) * theta) * theta;
}

double kappa_const(double p, int scan_points) {
  require_p_window(p, 1.0 + 1e-12, 2.0 - 1e-12, "kappa_const");
  if (scan_points < 3)
    throw std::invalid_argument("kappa_const: scan_points too small");
  // Parametrize by s with t = phi(s); psi_of_s avoids the cancellation that
  // would otherwise drown the infimum near t = 0 in roundoff.
  const auto objective = [p](double s) {
    const double t = phi_func(p, s);
    return (1.0 + t) * psi_of_s(p, s) / (t * t);
  };

  // Log-spaced scan, then golden-section refinement around the best node.
  const double lo = 1e-7, hi = 1e7;
  const double step = std::log(hi / lo) / (scan_points - 1);
  double best_t = lo, best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < scan_points; ++i) {
    const double t = lo * std::exp(step * i);
    const double v = objective(t);
    if (v < best_v) {
      best_v = v;
      best_t = t;
    }
  }
  double a = best_t * std::exp(-step), b = best_t * std::exp(step);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-10 * a; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = objective(x2);
    }
  }
  best_v = std::min(best_v, std::min(f1, f2));

  // The infimum over (0, inf) may sit at either end.
  const double limit0 = 0.5 * (p - 1.0) / (2.0 - p);  // psi''(0)/2
  const double limit_inf = p - 1.0;
  return std::min(best_v, std::min(limit0, limit_inf));
}

std::pair<double, ConstantRecipe> c_np(int n, double p) {
  if (n < 1) throw std::invalid_argument("c_np: n must be >= 1");
  require_p_window(p, 1.0 + 1e-12, 2.0 - 1e-12, "c_np");
  ConstantRecipe r;
  r.theta = 0.5;
  r.lambda = 1.0 / 32.0;
  const double t_cap = std::sqrt(8.0 * (p - 1.0) * (5.0 - 2.0 * p) / 3.0);
  r.t = 0.5 * std::min(1.0, t_cap);
  r.branch_far = kappa_star(p, r.theta);
  r.branch_mid = 0.25 * (2.0 - p) * (1.0 - r.theta) * std::min(r.t, 1.0);
  r.branch_near = (1.0 - r.theta) * r.lambda;
  const double c = std::min({r.branch_far, r.branch_mid, r.branch_near});
  return {c, r};
}

std::vector<RegionRow> region_sample(std::optional<double> d, int resolution) {
  if (resolution < 2)
    throw std::invalid_argument("region_sample: resolution must be >= 2");
  const double p_hi = d ? (*d > 2.0 ? p_critical(*d) : 5.0) : 2.0;
  std::vector<RegionRow> rows;
  rows.reserve(static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i) {
    const double p = 1.0 + (p_hi - 1.0) * i / (resolution - 1);
    RegionRow row{};
    row.p = p;
    const auto [mlo, mhi] = d ? m_pm_sphere(*d, p) : m_pm_gauss(p);
    row.m_minus = mlo;
    row.m_plus = mhi;
    // The m -> beta map is decreasing, so the window endpoints swap.
    const auto safe_beta = [p](double m) {
      const double den = 2.0 - p * (1.0 - m);
      return std::abs(den) < 1e-12
                 ? std::numeric_limits<double>::quiet_NaN()
                 : 2.0 / den;
    };
    row.beta_minus = safe_beta(mhi);
    row.beta_plus = safe_beta(mlo);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gaussflow::atlas
