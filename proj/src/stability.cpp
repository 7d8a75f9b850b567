#include "gaussflow/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "gaussflow/atlas.hpp"
#include "gaussflow/derivatives.hpp"

namespace gaussflow::stability {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_range(double p, const char* where) {
  if (!(p > 1.0) || !(p < 2.0))
    throw std::invalid_argument(std::string(where) + ": need 1 < p < 2");
}

double deficit_value(const GridFunction& f, double p, const MeasureSpec& mu) {
  return fisher(f, mu) - mu.lambda_star * entropy(f, p, mu);
}

}  // namespace

DeficitReport improved_gap_phi(const GridFunction& f, double p,
                                  const MeasureSpec& mu) {
  require_range(p, "improved_gap_phi");
  const double np = lp_norm(f, p, mu);
  const double m = np * np;
  const double e = entropy(f, p, mu);
  const double s = (2.0 - p) * e / m;
  const double rhs = mu.lambda_star / ((2.0 - p) * (2.0 - p)) * m *
                     atlas::phi_func(p, s);
  return DeficitReport::make("improved-gap-phi", fisher(f, mu), rhs);
}

std::pair<double, double> phi_remainder_forms(const GridFunction& f,
                                                 double p,
                                                 const MeasureSpec& mu) {
  require_range(p, "phi_remainder_forms");
  const double np = lp_norm(f, p, mu);
  const double n2 = lp_norm(f, 2.0, mu);
  const double m = np * np;
  const double l2 = n2 * n2;
  const double e = (l2 - m) / (2.0 - p);
  const double c = mu.lambda_star / ((2.0 - p) * (2.0 - p));

  const double phi_form =
      c * m * atlas::phi_func(p, (2.0 - p) * e / m) - mu.lambda_star * e;
  const double norms_form =
      c * ((p - 1.0) * l2 + (2.0 - p) * m -
           std::pow(l2, p - 1.0) * std::pow(m, 2.0 - p));
  return {phi_form, norms_form};
}

DeficitReport improved_gap_chi(const GridFunction& f, double p, double beta,
                               const MeasureSpec& mu) {
  require_range(p, "improved_gap_chi");
  const double beta_hi = atlas::beta_pm(p).second;
  if (!(beta >= 1.0 - 1e-12) || !(beta <= beta_hi + 1e-12))
    throw std::invalid_argument(
        "improved_gap_chi: beta must lie in [1, beta_plus(p)]");
  const double np = lp_norm(f, p, mu);
  const double m = np * np;
  const double s = (2.0 - p) * entropy(f, p, mu) / m;
  const double rhs = m * atlas::chi_beta(p, beta, mu.lambda_star, s);
  return DeficitReport::make("improved-gap-chi", fisher(f, mu), rhs);
}

std::pair<DeficitReport, DeficitReport> fourth_order_bound(
    const GridFunction& f, double p, const MeasureSpec& mu) {
  require_range(p, "fourth_order_bound");
  const double np = lp_norm(f, p, mu);
  const double n2 = lp_norm(f, 2.0, mu);
  const double m = np * np;
  const double i = fisher(f, mu);
  const double def = i - mu.lambda_star * entropy(f, p, mu);
  const double q = 2.0 - p;

  const double psi_rhs = mu.lambda_star * m / (q * q) *
                         atlas::psi_func(p, q * q * i / (mu.lambda_star * m));
  DeficitReport psi_report =
      DeficitReport::make("fourth-order-psi", def, psi_rhs);

  const double kappa = atlas::kappa_const(p);
  const double kappa_rhs =
      i > 0.0 ? kappa * i * i / (i + mu.lambda_star * n2 * n2 / (q * q)) : 0.0;
  DeficitReport kappa_report =
      DeficitReport::make("fourth-order-kappa", def, kappa_rhs);
  return {std::move(psi_report), std::move(kappa_report)};
}

DeficitReport orth_improvement(const GridFunction& f, double p,
                               const MeasureSpec& gamma) {
  if (!gamma.gaussian)
    throw std::invalid_argument("orth_improvement: Gaussian measure required");
  if (!(p >= 1.0) || !(p < 2.0))
    throw std::invalid_argument("orth_improvement: need 1 <= p < 2");
  const auto [proj, res] = project_pi1(f, gamma);
  const double rhs = 0.5 * (2.0 - p) * fisher(res, gamma);
  const double lhs = fisher(f, gamma) - entropy(f, p, gamma);
  return DeficitReport::make("orthogonality-improvement", lhs, rhs);
}

double poincare_lambda1(const MeasureSpec& mu) {
  const int n = mu.grid.point_count();
  const double dy = mu.grid.spacing();

  // Quadrature weights tau_i rho_i of the trapezoid rule.
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    const double tau = (i == 0 || i == n - 1) ? 0.5 * dy : dy;
    w(i) = tau * mu.weight[static_cast<std::size_t>(i)];
  }

  // Rows of the first-derivative operator (same stencils as derivative()).
  const double c = 1.0 / (12.0 * dy);
  std::vector<std::vector<std::pair<int, double>>> rows(
      static_cast<std::size_t>(n));
  rows[0] = {{0, -25 * c}, {1, 48 * c}, {2, -36 * c}, {3, 16 * c}, {4, -3 * c}};
  rows[1] = {{0, -3 * c}, {1, -10 * c}, {2, 18 * c}, {3, -6 * c}, {4, c}};
  for (int i = 2; i < n - 2; ++i)
    rows[static_cast<std::size_t>(i)] = {
        {i - 2, c}, {i - 1, -8 * c}, {i + 1, 8 * c}, {i + 2, -c}};
  rows[static_cast<std::size_t>(n - 2)] = {{n - 5, -c},
                                           {n - 4, 6 * c},
                                           {n - 3, -18 * c},
                                           {n - 2, 10 * c},
                                           {n - 1, 3 * c}};
  rows[static_cast<std::size_t>(n - 1)] = {{n - 5, 3 * c},
                                           {n - 4, -16 * c},
                                           {n - 3, 36 * c},
                                           {n - 2, -48 * c},
                                           {n - 1, 25 * c}};

  // Stiffness A_{jk} = sum_i w_i D_{ij} D_{ik}; mass B = diag(w).
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (const auto& [j, dij] : rows[static_cast<std::size_t>(i)])
      for (const auto& [k, dik] : rows[static_cast<std::size_t>(i)])
        a(j, k) += w(i) * dij * dik;

  Eigen::MatrixXd b = w.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      a, b, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("poincare_lambda1: eigensolver failed");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  const double threshold = 0.5 * mu.lambda_star;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > threshold) return ev(i);
  throw std::runtime_error(
      "poincare_lambda1: no eigenvalue above lambda_star / 2");
}

DeficitReport improved_lambda_check(const MeasureSpec& mu, double p,
                            const std::vector<GridFunction>& test_set) {
  if (test_set.empty())
    throw std::invalid_argument("improved_lambda_check: empty test set");
  const double lambda1 = poincare_lambda1(mu);
  const double lambda = atlas::lambda_combined(p, lambda1, mu.lambda_star);
  DeficitReport worst;
  bool first = true;
  for (const auto& f : test_set) {
    DeficitReport r = deficit(f, p, lambda, mu);
    if (first || r.slack < worst.slack) {
      worst = r;
      first = false;
    }
  }
  worst.tag = "improved-lambda-interpolation";
  return worst;
}

std::string StabilityBreakdown::to_json() const {
  nlohmann::ordered_json j;
  j["p"] = p;
  j["c"] = c;
  j["deficit"] = deficit;
  j["residual_fisher"] = residual_fisher;
  j["pi1_fisher"] = pi1_fisher;
  j["fisher_total"] = fisher_total;
  j["l2_sq"] = l2_sq;
  j["rhs"] = rhs;
  j["slack"] = slack;
  return j.dump();
}

StabilityBreakdown stability_check(const GridFunction& f, int n, double p,
                                   const MeasureSpec& gamma) {
  require_range(p, "stability_check");
  if (!gamma.gaussian)
    throw std::invalid_argument("stability_check: Gaussian measure required");

  GridFunction g = f;  // nonnegative representative
  for (double& v : g.values) v = std::abs(v);

  StabilityBreakdown sb;
  sb.p = p;
  sb.c = atlas::c_np(n, p).first;
  // The gradient of |f| has the same magnitude as that of f a.e.
  sb.fisher_total = fisher(f, gamma);
  const double n2 = lp_norm(g, 2.0, gamma);
  sb.l2_sq = n2 * n2;
  sb.deficit = sb.fisher_total - entropy(g, p, gamma);

  GridFunction yg = g;
  for (int i = 0; i < g.size(); ++i) yg[i] *= g.grid.node(i);
  const double c1 = integrate(yg, gamma);
  sb.pi1_fisher = c1 * c1;
  sb.residual_fisher = std::max(sb.fisher_total - sb.pi1_fisher, 0.0);
  const double den = sb.fisher_total + sb.l2_sq;
  sb.rhs = sb.c * (sb.residual_fisher +
                   (den > 0.0 ? sb.pi1_fisher * sb.pi1_fisher / den : 0.0));
  sb.slack = sb.deficit - sb.rhs;
  return sb;
}

TailComparison gaussian_ball_tail(double eps, int n) {
  if (!(eps > 0.0) || !(eps < 0.5))
    throw std::invalid_argument("gaussian_ball_tail: need eps in (0, 1/2)");
  const double radius = 1.0 / (2.0 * eps);

  // Radial quadrature of the exact tail on a dedicated fine grid.
  const double upper = radius + 30.0;
  const int m = 100001;
  const double h = (upper - radius) / (m - 1);
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    const double r = radius + h * i;
    const double val = std::pow(r, n - 1) * std::exp(-0.5 * r * r);
    acc += (i == 0 || i == m - 1) ? 0.5 * val : val;
  }
  const double surface = 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
  TailComparison tc;
  tc.numeric = surface * acc * h / std::pow(2.0 * kPi, 0.5 * n);

  const double cn = std::pow(2.0, 1.5 * (2.0 - n)) / std::tgamma(0.5 * n);
  tc.asymptotic = cn * std::pow(eps, 2.0 - n) *
                  std::exp(-1.0 / (8.0 * eps * eps));
  tc.relative_error = std::abs(tc.numeric - tc.asymptotic) / tc.numeric;
  return tc;
}

ProofProbe proof_probes(const GridFunction& f, double p, double theta,
                        double t, const MeasureSpec& gamma) {
  require_range(p, "proof_probes");
  if (!(theta > 0.0) || !(theta < 1.0) || !(t > 0.0))
    throw std::invalid_argument("proof_probes: need theta in (0,1), t > 0");
  if (!gamma.gaussian)
    throw std::invalid_argument("proof_probes: Gaussian measure required");
  GridFunction g = f;
  for (double& v : g.values) v = std::abs(v);
  const double n2 = lp_norm(g, 2.0, gamma);
  if (std::abs(n2 - 1.0) > 1e-8)
    throw std::invalid_argument("proof_probes: f must satisfy ||f||_2 = 1");

  ProofProbe probe;
  probe.theta = theta;
  probe.t = t;
  probe.fisher = fisher(g, gamma);
  probe.deficit = probe.fisher - entropy(g, p, gamma);
  probe.mean = integrate(g, gamma);

  if (probe.fisher >= theta) {
    probe.branch = 1;
    probe.guaranteed_bound = atlas::kappa_star(p, theta) * probe.fisher;
    probe.bound_holds = probe.deficit >= probe.guaranteed_bound - 1e-10;
    return probe;
  }

  probe.mean_window_ok =
      probe.mean >= std::sqrt(1.0 - theta) - 1e-10 && probe.mean <= 1.0 + 1e-10;

  // u_f = g / mean = 1 + eps y + eta r with ||grad r||_2 = 1.
  GridFunction u = g;
  for (double& v : u.values) v /= probe.mean;
  GridFunction yu = u;
  for (int i = 0; i < u.size(); ++i) yu[i] *= u.grid.node(i);
  const double c1 = integrate(yu, gamma);
  probe.eps = std::abs(c1);
  GridFunction res = u;
  for (int i = 0; i < u.size(); ++i)
    res[i] = u[i] - 1.0 - c1 * u.grid.node(i);
  probe.eta = std::sqrt(std::max(fisher(res, gamma), 0.0));

  const double resid_fisher = probe.eta * probe.eta;
  const double pi1_fisher = c1 * c1;
  const double den = probe.fisher + 1.0;  // ||f||_2^2 = 1

  if (probe.eta > t * probe.eps * probe.eps) {
    probe.branch = 2;
    const double scale = probe.mean * probe.mean;
    probe.guaranteed_bound =
        0.25 * (2.0 - p) * (1.0 - theta) *
        (scale * resid_fisher + t * t * scale * scale * pi1_fisher *
                                    pi1_fisher / den);
    probe.bound_holds = probe.deficit >= probe.guaranteed_bound - 1e-10;
  } else {
    probe.branch = 3;
    const double lambda = 1.0 / 32.0;
    const double scale = probe.mean * probe.mean;
    probe.guaranteed_bound =
        (1.0 - theta) * lambda *
        (scale * resid_fisher +
         scale * scale * pi1_fisher * pi1_fisher / den);
    probe.bound_holds = probe.deficit >= probe.guaranteed_bound - 1e-10;
  }

  // Taylor-expansion diagnostics of ||u_f||_p^2 near the optimizers.
  if (probe.eps > 1e-8 && probe.eps < 0.5) {
    const double up = lp_norm(u, p, gamma);
    GridFunction y2res = res;
    for (int i = 0; i < res.size(); ++i) {
      const double y = res.grid.node(i);
      y2res[i] = y * y * res[i];
    }
    const double cross = integrate(y2res, gamma);
    const double res_l2 = lp_norm(res, 2.0, gamma);
    const double e2 = probe.eps * probe.eps;
    const double core =
        1.0 + (p - 1.0) * (e2 + res_l2 * res_l2) +
        (p - 1.0) * (2.0 - p) * (0.5 * e2 * e2 + e2 * cross);
    probe.taylor_gap = up * up - core;
    const double band = e2 * e2 / std::log(1.0 / probe.eps);
    probe.taylor_band = -probe.taylor_gap / band;
  }
  return probe;
}

}  // namespace gaussflow::stability
