#include <doctest.h>

#include <cmath>
#include <random>

#include "gaussflow/derivatives.hpp"
#include "gaussflow/grid.hpp"
#include "gaussflow/measure.hpp"

using namespace gaussflow;

namespace {
constexpr double kSqrt2Pi = 2.5066282746310002;

MeasureSpec gauss512() { return build_gaussian(10.0, 512); }
}  // namespace

TEST_CASE("grid construction and invariants") {
  Grid1D g(10.0, 1024);
  CHECK(g.point_count() == 1024);
  CHECK(g.node(0) == -10.0);
  CHECK(g.node(1023) == 10.0);
  for (int i = 1; i < g.point_count(); ++i) CHECK(g.node(i) > g.node(i - 1));
  // exact mirror symmetry
  for (int i = 0; i < g.point_count(); ++i)
    CHECK(g.node(i) == -g.node(g.point_count() - 1 - i));
  CHECK_THROWS_AS(Grid1D(10.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(Grid1D(-1.0, 64), std::invalid_argument);
}

TEST_CASE("gaussian measure normalization and moments") {
  const MeasureSpec gamma = build_gaussian(10.0, 1024);
  CHECK(gamma.Z == doctest::Approx(kSqrt2Pi).epsilon(1e-9));
  CHECK(gamma.lambda_star == 1.0);
  CHECK(gamma.gaussian);

  const GridFunction one = GridFunction::sample(gamma.grid, [](double) { return 1.0; });
  CHECK(std::abs(integrate(one, gamma) - 1.0) < 1e-10);

  const GridFunction y = GridFunction::sample(gamma.grid, [](double t) { return t; });
  CHECK(std::abs(integrate(y, gamma)) < 1e-10);

  const GridFunction y2 = GridFunction::sample(gamma.grid, [](double t) { return t * t; });
  CHECK(std::abs(integrate(y2, gamma) - 1.0) < 1e-8);

  const GridFunction y4 = GridFunction::sample(gamma.grid, [](double t) { return t * t * t * t; });
  CHECK(std::abs(integrate(y4, gamma) - 3.0) < 1e-7);
}

TEST_CASE("gaussian builder rejects short domains") {
  CHECK_THROWS_AS(build_gaussian(5.0, 64), std::invalid_argument);
}

TEST_CASE("custom measure matches gaussian for the harmonic potential") {
  Grid1D grid(10.0, 512);
  std::vector<double> phi(512);
  for (int i = 0; i < 512; ++i) phi[i] = 0.5 * grid.node(i) * grid.node(i);
  const MeasureSpec mu = build_custom(phi, 1.0, grid);
  const MeasureSpec gamma = gauss512();
  CHECK(mu.Z == doctest::Approx(gamma.Z).epsilon(1e-14));
  const GridFunction y2 = GridFunction::sample(grid, [](double t) { return t * t; });
  CHECK(integrate(y2, mu) == doctest::Approx(integrate(y2, gamma)).epsilon(1e-14));
  CHECK_FALSE(mu.gaussian);
}

TEST_CASE("custom measure convexity screening") {
  Grid1D grid(10.0, 512);
  std::vector<double> mild(512), bad(512);
  for (int i = 0; i < 512; ++i) {
    const double y = grid.node(i);
    mild[i] = 0.5 * y * y + 0.1 * std::cos(y);  // phi'' = 1 - 0.1 cos >= 0.9
    bad[i] = 0.5 * y * y + std::cos(y);         // phi'' dips to 0
  }
  CHECK_NOTHROW(build_custom(mild, 0.9, grid));
  CHECK_THROWS_WITH_AS(build_custom(bad, 0.9, grid),
                       doctest::Contains("node"), std::invalid_argument);
}

TEST_CASE("integrate rejects grid mismatch") {
  const MeasureSpec gamma = gauss512();
  Grid1D other(10.0, 256);
  const GridFunction f = GridFunction::sample(other, [](double) { return 1.0; });
  CHECK_THROWS_AS(integrate(f, gamma), std::invalid_argument);
}

TEST_CASE("derivative is exact on quadratics and vanishes on constants") {
  Grid1D grid(10.0, 128);
  const GridFunction y2 = GridFunction::sample(grid, [](double t) { return t * t; });
  const GridFunction d = derivative(y2);
  for (int i = 2; i < grid.point_count() - 2; ++i)
    CHECK(d[i] == doctest::Approx(2.0 * grid.node(i)).epsilon(1e-13));

  const GridFunction c = GridFunction::sample(grid, [](double) { return 3.7; });
  for (double v : derivative(c).values) CHECK(std::abs(v) < 1e-12);
  for (double v : second_derivative(c).values) CHECK(std::abs(v) < 1e-11);
}

TEST_CASE("derivative converges at fourth order on sin") {
  // Independent oracle: the exact derivative cos. Order fit over refinement.
  std::vector<double> logn, logerr;
  for (int n : {64, 128, 256, 512}) {
    Grid1D grid(10.0, n);
    const GridFunction f = GridFunction::sample(grid, [](double t) { return std::sin(t); });
    const GridFunction d = derivative(f);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(d[i] - std::cos(grid.node(i))));
    logn.push_back(std::log(n));
    logerr.push_back(std::log(worst));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < logn.size(); ++i) {
    sx += logn[i];
    sy += logerr[i];
    sxx += logn[i] * logn[i];
    sxy += logn[i] * logerr[i];
  }
  const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  CHECK(-slope >= 3.8);
}

TEST_CASE("OU operator on Hermite eigenfunctions") {
  const MeasureSpec gamma = gauss512();
  const GridFunction y = GridFunction::sample(gamma.grid, [](double t) { return t; });
  const GridFunction ly = apply_OU(y, gamma);
  for (int i = 0; i < y.size(); ++i)
    CHECK(ly[i] == doctest::Approx(-gamma.grid.node(i)).epsilon(1e-11));

  const GridFunction h2 = GridFunction::sample(gamma.grid, [](double t) { return t * t - 1.0; });
  const GridFunction lh2 = apply_OU(h2, gamma);
  for (int i = 0; i < h2.size(); ++i)
    CHECK(lh2[i] == doctest::Approx(-2.0 * h2[i]).epsilon(1e-10).scale(1.0 + std::abs(h2[i])));

  const GridFunction c = GridFunction::sample(gamma.grid, [](double) { return 4.2; });
  for (double v : apply_OU(c, gamma).values) CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("OU operator integrates to zero against the measure") {
  const MeasureSpec gamma = build_gaussian(10.0, 1024);
  const auto probe = [&](auto fn) {
    const GridFunction f = GridFunction::sample(gamma.grid, fn);
    return std::abs(integrate(apply_OU(f, gamma), gamma));
  };
  CHECK(probe([](double t) { return std::exp(-t * t / 9.0); }) < 1e-8);
  CHECK(probe([](double t) { return std::sin(t) * std::exp(-t * t / 8.0); }) < 1e-8);
  CHECK(probe([](double t) { return 1.0 / (1.0 + t * t); }) < 1e-8);
}

TEST_CASE("integrated Bochner bound") {
  const MeasureSpec gamma = build_gaussian(10.0, 1024);
  const auto check_one = [&](auto fn) {
    const GridFunction f = GridFunction::sample(gamma.grid, fn);
    GridFunction lf = apply_OU(f, gamma);
    for (double& v : lf.values) v *= v;
    GridFunction d2 = second_derivative(f);
    for (double& v : d2.values) v *= v;
    GridFunction d1 = derivative(f);
    for (double& v : d1.values) v *= v;
    const double lhs = integrate(lf, gamma);
    const double rhs = integrate(d2, gamma) + gamma.lambda_star * integrate(d1, gamma);
    CHECK(lhs >= rhs - 1e-6);
  };
  check_one([](double t) { return std::exp(-t * t / 9.0); });
  check_one([](double t) { return std::cos(2.0 * t) * std::exp(-t * t / 6.0); });
}

TEST_CASE("quadrature and differentiation are linear") {
  const MeasureSpec gamma = gauss512();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridFunction f = GridFunction::sample(gamma.grid, [&](double) { return u(rng); });
  GridFunction g = GridFunction::sample(gamma.grid, [&](double) { return u(rng); });
  const double a = 1.7, b = -0.4;
  GridFunction combo = f;
  for (int i = 0; i < f.size(); ++i) combo[i] = a * f[i] + b * g[i];

  const double lhs = integrate(combo, gamma);
  const double rhs = a * integrate(f, gamma) + b * integrate(g, gamma);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));

  const GridFunction dc = derivative(combo), df = derivative(f), dg = derivative(g);
  for (int i = 0; i < f.size(); ++i)
    CHECK(dc[i] == doctest::Approx(a * df[i] + b * dg[i])
                       .epsilon(1e-11)
                       .scale(1.0 + std::abs(dc[i])));
}
