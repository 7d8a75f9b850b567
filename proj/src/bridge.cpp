#include "gaussflow/bridge.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "gaussflow/derivatives.hpp"
#include "gaussflow/functionals.hpp"

namespace gaussflow::bridge {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_compact_support(const GridFunction& v) {
  const int n = v.size();
  for (int i = 0; i < 4; ++i)
    if (std::abs(v[i]) > 1e-14 || std::abs(v[n - 1 - i]) > 1e-14)
      throw std::invalid_argument(
          "bridge: v must vanish (<1e-14) at the outer 4 nodes");
}

/// log |S^{d}| = log 2 + ((d+1)/2) log pi - lgamma((d+1)/2).
double log_sphere_area(double d) {
  return std::log(2.0) + 0.5 * (d + 1.0) * std::log(kPi) -
         std::lgamma(0.5 * (d + 1.0));
}

/// Plain trapezoid of vals dy on the grid (Lebesgue, no measure weight).
double lebesgue_trapezoid(const std::vector<double>& vals, double dy) {
  const std::size_t n = vals.size();
  double acc = 0.5 * (vals[0] + vals[n - 1]);
  for (std::size_t i = 1; i + 1 < n; ++i) acc += vals[i];
  return acc * dy;
}

BridgeEvaluation evaluate(const GridFunction& v, int n, double d, double p,
                          bool logsob_target) {
  if (n < 1) throw std::invalid_argument("bridge: n must be >= 1");
  if (!(d > std::max(static_cast<double>(n), 3.0)))
    throw std::invalid_argument("bridge: need d > max(n, 3)");
  if (!(p >= 1.0 && p < 2.0))
    throw std::invalid_argument("bridge: need 1 <= p < 2");
  require_compact_support(v);

  const auto& grid = v.grid;
  const double dy = grid.spacing();
  const std::size_t nn = v.values.size();

  // Weights (1 + y^2/d)^{2-(d+n)/2} and (1 + y^2/d)^{-(d+n)/2} left after
  // integrating the transverse directions in closed form.
  const double half = 0.5 * (d + static_cast<double>(n));
  std::vector<double> grad_int(nn), l2_int(nn), lp_int(nn), d1;
  derivative_values(v.values, dy, d1);
  for (std::size_t i = 0; i < nn; ++i) {
    const double y = grid.node(static_cast<int>(i));
    const double lw = std::log1p(y * y / d);
    const double w_grad = std::exp((2.0 - half) * lw);
    const double w_flat = std::exp(-half * lw);
    grad_int[i] = d1[i] * d1[i] * w_grad;
    l2_int[i] = v.values[i] * v.values[i] * w_flat;
    lp_int[i] = std::pow(std::abs(v.values[i]), p) * w_flat;
  }
  const double grad_y = lebesgue_trapezoid(grad_int, dy);
  const double l2_y = lebesgue_trapezoid(l2_int, dy);
  const double lp_y = lebesgue_trapezoid(lp_int, dy);

  const double dn = static_cast<double>(n);
  const double log_z2 = log_zeta_integral(d - dn, d - 2.0, d);
  const double log_z0 = log_zeta_integral(d - dn, d, d);
  const double log_cd = log_c_d(d);

  BridgeEvaluation ev;
  ev.d = d;
  ev.p = p;
  ev.gradient_term = 0.25 * std::exp(log_z2 - log_cd) * grad_y;
  ev.l2_term = std::exp(log_z0 - log_cd) * l2_y;

  // Constant of the weighted interpolation inequality,
  // C_{d,p} = 2^{delta(p)/p} d |S^d|^{1-2/p} with delta(p) = 2d - p(d-2),
  // combined with d^{d(p-2)/(2p)} / (4 d c_d) into one exponential.
  const double delta_p = 2.0 * d - p * (d - 2.0);
  const double log_const = (delta_p / p) * std::log(2.0) + std::log(d) +
                           (1.0 - 2.0 / p) * log_sphere_area(d) +
                           d * (p - 2.0) / (2.0 * p) * std::log(d) -
                           std::log(4.0 * d) - log_cd;
  ev.lp_term = lp_y > 0.0
                   ? std::exp(log_const +
                              (2.0 / p) * (std::log(lp_y) + log_z0))
                   : 0.0;
  ev.combined = ev.gradient_term + (ev.lp_term - ev.l2_term) / (2.0 - p);

  const MeasureSpec gamma =
      build_gaussian(grid.half_width(), grid.point_count());
  ev.gaussian_target = logsob_target
                           ? logsob_deficit(v, gamma, 1.0).slack
                           : deficit(v, p, 1.0, gamma).slack;
  return ev;
}

}  // namespace

double log_zeta_integral(double a, double b, double d) {
  if (!(a > 0.0) || !(a < 2.0 * b))
    throw std::invalid_argument("zeta_integral: need 0 < a < 2b");
  return 0.5 * a * std::log(d * kPi) + std::lgamma(b - 0.5 * a) -
         std::lgamma(b);
}

double zeta_integral(double a, double b, double d) {
  return std::exp(log_zeta_integral(a, b, d));
}

double log_c_d(double d) {
  return 0.5 * d * std::log(d * kPi) + std::lgamma(0.5 * d) - std::lgamma(d);
}

BridgeEvaluation sphere_functionals(const GridFunction& v, int n, double d,
                                    double p) {
  return evaluate(v, n, d, p, /*logsob_target=*/false);
}

BridgeEvaluation logsob_bridge(const GridFunction& v, double d, double p_d) {
  if (!(p_d > 1.0) || !(p_d < 2.0))
    throw std::invalid_argument("logsob_bridge: need 1 < p_d < 2");
  return evaluate(v, 1, d, p_d, /*logsob_target=*/true);
}

}  // namespace gaussflow::bridge
