#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaussflow {

/// Uniform symmetric grid on [-L, L].
///
/// Nodes are computed as y_i = (2i - (N-1)) * (L / (N-1)) so that the grid is
/// exactly symmetric in floating point: y_i == -y_{N-1-i}. Symmetric
/// quadrature then annihilates odd integrands exactly.
class Grid1D {
 public:
  Grid1D(double half_width, int point_count)
      : half_width_(half_width), point_count_(point_count) {
    if (!(half_width > 0.0))
      throw std::invalid_argument("Grid1D: half_width must be positive");
    if (point_count < 16)
      throw std::invalid_argument("Grid1D: need at least 16 points, got " +
                                  std::to_string(point_count));
    const double scale = half_width / static_cast<double>(point_count - 1);
    nodes_.resize(static_cast<std::size_t>(point_count));
    for (int i = 0; i < point_count; ++i)
      nodes_[static_cast<std::size_t>(i)] =
          static_cast<double>(2 * i - (point_count - 1)) * scale;
    spacing_ = 2.0 * half_width / static_cast<double>(point_count - 1);
  }

  double half_width() const { return half_width_; }
  int point_count() const { return point_count_; }
  double spacing() const { return spacing_; }
  const std::vector<double>& nodes() const { return nodes_; }
  double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }

  bool same_as(const Grid1D& other) const {
    return point_count_ == other.point_count_ &&
           half_width_ == other.half_width_;
  }

 private:
  double half_width_;
  int point_count_;
  double spacing_;
  std::vector<double> nodes_;
};

/// Real-valued function sampled on a Grid1D. Carrier for f, w, v, r.
struct GridFunction {
  Grid1D grid;
  std::vector<double> values;

  GridFunction(Grid1D g, std::vector<double> v)
      : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != static_cast<std::size_t>(grid.point_count()))
      throw std::invalid_argument(
          "GridFunction: value count does not match grid");
  }

  template <class Fn>
  static GridFunction sample(const Grid1D& g, Fn&& fn) {
    std::vector<double> v(static_cast<std::size_t>(g.point_count()));
    for (int i = 0; i < g.point_count(); ++i)
      v[static_cast<std::size_t>(i)] = fn(g.node(i));
    return GridFunction(g, std::move(v));
  }

  int size() const { return grid.point_count(); }
  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
};

inline void require_same_grid(const Grid1D& a, const Grid1D& b,
                              const char* where) {
  if (!a.same_as(b))
    throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

}  // namespace gaussflow
