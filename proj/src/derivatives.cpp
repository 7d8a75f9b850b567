#include "gaussflow/derivatives.hpp"

#include <cstddef>
#include <stdexcept>

namespace gaussflow {

void derivative_values(const std::vector<double>& f, double dy,
                       std::vector<double>& out) {
  const std::size_t n = f.size();
  if (n < 16) throw std::invalid_argument("derivative: need at least 16 nodes");
  out.resize(n);
  const double c = 1.0 / (12.0 * dy);

  out[0] = c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] -
                3.0 * f[4]);
  out[1] =
      c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
  for (std::size_t i = 2; i + 2 < n; ++i)
    out[i] = c * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
  out[n - 2] = c * (-f[n - 5] + 6.0 * f[n - 4] - 18.0 * f[n - 3] +
                    10.0 * f[n - 2] + 3.0 * f[n - 1]);
  out[n - 1] = c * (3.0 * f[n - 5] - 16.0 * f[n - 4] + 36.0 * f[n - 3] -
                    48.0 * f[n - 2] + 25.0 * f[n - 1]);
}

void second_derivative_values(const std::vector<double>& f, double dy,
                              std::vector<double>& out) {
  const std::size_t n = f.size();
  if (n < 16)
    throw std::invalid_argument("second_derivative: need at least 16 nodes");
  out.resize(n);
  const double c = 1.0 / (12.0 * dy * dy);

  out[0] = c * (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] +
                61.0 * f[4] - 10.0 * f[5]);
  out[1] = c * (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] -
                6.0 * f[4] + f[5]);
  for (std::size_t i = 2; i + 2 < n; ++i)
    out[i] = c * (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] +
                  16.0 * f[i + 1] - f[i + 2]);
  out[n - 2] = c * (f[n - 6] - 6.0 * f[n - 5] + 14.0 * f[n - 4] -
                    4.0 * f[n - 3] - 15.0 * f[n - 2] + 10.0 * f[n - 1]);
  out[n - 1] = c * (-10.0 * f[n - 6] + 61.0 * f[n - 5] - 156.0 * f[n - 4] +
                    214.0 * f[n - 3] - 154.0 * f[n - 2] + 45.0 * f[n - 1]);
}

GridFunction derivative(const GridFunction& f) {
  std::vector<double> out;
  derivative_values(f.values, f.grid.spacing(), out);
  return GridFunction(f.grid, std::move(out));
}

GridFunction second_derivative(const GridFunction& f) {
  std::vector<double> out;
  second_derivative_values(f.values, f.grid.spacing(), out);
  return GridFunction(f.grid, std::move(out));
}

}  // namespace gaussflow
