#include "gaussflow/measure.hpp"

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>

#include "gaussflow/derivatives.hpp"

namespace gaussflow {

double weighted_trapezoid(const std::vector<double>& values,
                          const std::vector<double>& weight, double dy) {
  const std::size_t n = values.size();
  if (weight.size() != n)
    throw std::invalid_argument("weighted_trapezoid: size mismatch");
  // Pair mirrored nodes; boundary nodes carry half weight.
  std::size_t i = 0, j = n - 1;
  double acc = 0.5 * (values[i] * weight[i] + values[j] * weight[j]);
  for (++i, --j; i < j; ++i, --j)
    acc += values[i] * weight[i] + values[j] * weight[j];
  if (i == j) acc += values[i] * weight[i];
  return acc * dy;
}

namespace {

MeasureSpec finish_measure(Grid1D grid, std::vector<double> phi,
                           double lambda_star, bool gaussian) {
  MeasureSpec mu{std::move(grid), std::move(phi), {}, {}, lambda_star, 0.0,
                 gaussian};
  const std::size_t n = mu.phi.size();
  mu.weight.resize(n);
  for (std::size_t i = 0; i < n; ++i) mu.weight[i] = std::exp(-mu.phi[i]);
  derivative_values(mu.phi, mu.grid.spacing(), mu.phi_prime);
  std::vector<double> ones(n, 1.0);
  mu.Z = weighted_trapezoid(ones, mu.weight, mu.grid.spacing());
  if (!(mu.Z > 0.0) || !std::isfinite(mu.Z))
    throw std::runtime_error("MeasureSpec: normalization is not positive");
  return mu;
}

}  // namespace

MeasureSpec build_gaussian(double half_width, int point_count) {
  if (half_width < 6.0)
    throw std::invalid_argument(
        "build_gaussian: half_width below 6 leaves tail mass above 1e-9");
  Grid1D grid(half_width, point_count);
  std::vector<double> phi(static_cast<std::size_t>(point_count));
  for (int i = 0; i < point_count; ++i) {
    const double y = grid.node(i);
    phi[static_cast<std::size_t>(i)] = 0.5 * y * y;
  }
  return finish_measure(std::move(grid), std::move(phi), 1.0, true);
}

MeasureSpec build_custom(std::vector<double> phi_values, double lambda_star,
                         const Grid1D& grid) {
  if (phi_values.size() != static_cast<std::size_t>(grid.point_count()))
    throw std::invalid_argument("build_custom: potential size mismatch");
  if (!(lambda_star > 0.0))
    throw std::invalid_argument("build_custom: lambda_star must be positive");
  for (double v : phi_values)
    if (!std::isfinite(v))
      throw std::invalid_argument("build_custom: potential must be finite");

  std::vector<double> hess;
  second_derivative_values(phi_values, grid.spacing(), hess);
  const double tol = 1e-8;
  int worst = -1;
  double worst_val = lambda_star;
  for (int i = 2; i < grid.point_count() - 2; ++i) {
    const double h = hess[static_cast<std::size_t>(i)];
    if (h < worst_val) {
      worst_val = h;
      worst = i;
    }
  }
  if (worst >= 0 && worst_val < lambda_star - tol) {
    std::ostringstream msg;
    msg << "build_custom: convexity bound violated at node " << worst
        << " (y=" << grid.node(worst) << "): phi''=" << worst_val
        << " < lambda_star=" << lambda_star;
    throw std::invalid_argument(msg.str());
  }
  return finish_measure(grid, std::move(phi_values), lambda_star, false);
}

double integrate(const GridFunction& f, const MeasureSpec& mu) {
  require_same_grid(f.grid, mu.grid, "integrate");
  return weighted_trapezoid(f.values, mu.weight, mu.grid.spacing()) / mu.Z;
}

GridFunction apply_OU(const GridFunction& f, const MeasureSpec& mu) {
  require_same_grid(f.grid, mu.grid, "apply_OU");
  const std::size_t n = f.values.size();
  std::vector<double> d1, d2;
  derivative_values(f.values, f.grid.spacing(), d1);
  second_derivative_values(f.values, f.grid.spacing(), d2);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = d2[i] - mu.phi_prime[i] * d1[i];
  return GridFunction(f.grid, std::move(out));
}

}  // namespace gaussflow
