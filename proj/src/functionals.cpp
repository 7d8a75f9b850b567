#include "gaussflow/functionals.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "gaussflow/derivatives.hpp"

namespace gaussflow {

DeficitReport DeficitReport::make(std::string tag, double lhs, double rhs) {
  DeficitReport r;
  r.tag = std::move(tag);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = lhs - rhs;
  const double tol = 1e-8 * (1.0 + std::abs(lhs));
  if (std::abs(r.slack) < tol)
    r.verdict = "borderline";
  else
    r.verdict = r.slack > 0.0 ? "holds" : "fails";
  return r;
}

std::string DeficitReport::to_json() const {
  nlohmann::ordered_json j;
  j["tag"] = tag;
  j["lhs"] = lhs;
  j["rhs"] = rhs;
  j["slack"] = slack;
  j["verdict"] = verdict;
  return j.dump();
}

double lp_norm(const GridFunction& f, double p, const MeasureSpec& mu) {
  if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
  require_same_grid(f.grid, mu.grid, "lp_norm");
  const std::size_t n = f.values.size();
  std::vector<double> absp(n);
  if (p == 1.0) {
    for (std::size_t i = 0; i < n; ++i) absp[i] = std::abs(f.values[i]);
  } else if (p == 2.0) {
    for (std::size_t i = 0; i < n; ++i) absp[i] = f.values[i] * f.values[i];
  } else {
    for (std::size_t i = 0; i < n; ++i)
      absp[i] = std::pow(std::abs(f.values[i]), p);
  }
  const double m =
      weighted_trapezoid(absp, mu.weight, mu.grid.spacing()) / mu.Z;
  return std::pow(m, 1.0 / p);
}

double entropy(const GridFunction& f, double p, const MeasureSpec& mu) {
  if (p < 1.0 || p >= 2.0)
    throw std::invalid_argument("entropy: need 1 <= p < 2");
  const double n2 = lp_norm(f, 2.0, mu);
  const double np = lp_norm(f, p, mu);
  return (n2 * n2 - np * np) / (2.0 - p);
}

double fisher(const GridFunction& f, const MeasureSpec& mu) {
  require_same_grid(f.grid, mu.grid, "fisher");
  std::vector<double> d1;
  derivative_values(f.values, f.grid.spacing(), d1);
  for (double& v : d1) v *= v;
  return weighted_trapezoid(d1, mu.weight, mu.grid.spacing()) / mu.Z;
}

DeficitReport deficit(const GridFunction& f, double p, double lambda,
                      const MeasureSpec& mu) {
  if (!(lambda > 0.0)) throw std::invalid_argument("deficit: lambda <= 0");
  return DeficitReport::make("interpolation", fisher(f, mu),
                             lambda * entropy(f, p, mu));
}

double log_entropy(const GridFunction& f, const MeasureSpec& mu) {
  const double n2 = lp_norm(f, 2.0, mu);
  const double l2sq = n2 * n2;
  const std::size_t n = f.values.size();
  std::vector<double> integrand(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = f.values[i] * f.values[i];
    integrand[i] = s > 0.0 ? s * std::log(s / l2sq) : 0.0;
  }
  return 0.5 *
         weighted_trapezoid(integrand, mu.weight, mu.grid.spacing()) / mu.Z;
}

DeficitReport logsob_deficit(const GridFunction& f, const MeasureSpec& mu,
                             double lambda) {
  require_same_grid(f.grid, mu.grid, "logsob_deficit");
  for (double v : f.values)
    if (v < 0.0)
      throw std::invalid_argument("logsob_deficit: f must be nonnegative");
  return DeficitReport::make("log-sobolev", fisher(f, mu),
                             lambda * log_entropy(f, mu));
}

std::pair<GridFunction, GridFunction> project_pi1(const GridFunction& f,
                                                  const MeasureSpec& gamma) {
  if (!gamma.gaussian)
    throw std::invalid_argument("project_pi1: Gaussian measure required");
  require_same_grid(f.grid, gamma.grid, "project_pi1");
  const double c0 = integrate(f, gamma);
  GridFunction yf = f;
  for (int i = 0; i < f.size(); ++i) yf[i] *= f.grid.node(i);
  const double c1 = integrate(yf, gamma);
  GridFunction proj = f, res = f;
  for (int i = 0; i < f.size(); ++i) {
    proj[i] = c0 + c1 * f.grid.node(i);
    res[i] = f[i] - proj[i];
  }
  return {std::move(proj), std::move(res)};
}

}  // namespace gaussflow
