#pragma once

#include <vector>

#include "gaussflow/grid.hpp"

namespace gaussflow {

/// First derivative: 4th-order central stencil in the interior, one-sided
/// 4th-order stencils on the two outermost layers at each end.
void derivative_values(const std::vector<double>& f, double dy,
                       std::vector<double>& out);

/// Second derivative, same accuracy layout as derivative_values.
void second_derivative_values(const std::vector<double>& f, double dy,
                              std::vector<double>& out);

GridFunction derivative(const GridFunction& f);
GridFunction second_derivative(const GridFunction& f);

}  // namespace gaussflow
