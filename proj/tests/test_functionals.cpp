#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "gaussflow/functionals.hpp"
#include "gaussflow/hermite.hpp"
#include "gaussflow/measure.hpp"

using namespace gaussflow;

namespace {

const MeasureSpec& gamma1024() {
  static const MeasureSpec g = build_gaussian(10.0, 1024);
  return g;
}

GridFunction linear_probe(const Grid1D& grid, double eps) {
  return GridFunction::sample(grid, [eps](double y) { return 1.0 + eps * y; });
}

}  // namespace

TEST_CASE("lp norms of constants and near-constants") {
  const auto& gamma = gamma1024();
  const GridFunction c = GridFunction::sample(gamma.grid, [](double) { return -2.5; });
  for (double p : {1.0, 1.3, 2.0})
    CHECK(lp_norm(c, p, gamma) == doctest::Approx(2.5).epsilon(1e-12));

  const GridFunction f = linear_probe(gamma.grid, 0.2);
  const double n2 = lp_norm(f, 2.0, gamma);
  CHECK(n2 * n2 == doctest::Approx(1.04).epsilon(1e-12));

  CHECK_THROWS_AS(lp_norm(f, 0.5, gamma), std::invalid_argument);
}

TEST_CASE("lp norm is monotone in p on a probability measure") {
  const auto& gamma = gamma1024();
  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    const GridFunction f = random_hermite_function(gamma.grid, rng);
    const double n2 = lp_norm(f, 2.0, gamma);
    for (double p : {1.0, 1.4, 1.8})
      CHECK(lp_norm(f, p, gamma) <= n2 + 1e-12);
  }
}

TEST_CASE("entropy of the linear family matches its series") {
  // Series oracle: E[1 + eps y] = eps^2 - (p-1)/2 eps^4 + O(eps^6),
  // obtained from ||f||_p^2 = 1 + (p-1) eps^2 + (p-1)(2-p)/2 eps^4 + ...
  const auto& gamma = gamma1024();
  for (double p : {1.2, 1.5, 1.8}) {
    for (double eps : {0.02, 0.05, 0.1}) {
      const double e = entropy(linear_probe(gamma.grid, eps), p, gamma);
      const double series = eps * eps - 0.5 * (p - 1.0) * std::pow(eps, 4);
      CHECK(std::abs(e - series) < 5.0 * std::pow(eps, 6) + 1e-12);
    }
  }
  const GridFunction c = GridFunction::sample(gamma.grid, [](double) { return 0.7; });
  CHECK(std::abs(entropy(c, 1.5, gamma)) < 1e-13);
  CHECK_THROWS_AS(entropy(c, 2.0, gamma), std::invalid_argument);
  CHECK_THROWS_AS(entropy(c, 0.9, gamma), std::invalid_argument);
}

TEST_CASE("entropy is nonnegative on random functions") {
  const auto& gamma = gamma1024();
  std::mt19937_64 rng(23);
  for (int k = 0; k < 50; ++k) {
    const GridFunction f = random_hermite_function(gamma.grid, rng);
    for (double p : {1.1, 1.5, 1.9}) CHECK(entropy(f, p, gamma) >= -1e-12);
  }
}

TEST_CASE("fisher information basics") {
  const auto& gamma = gamma1024();
  const GridFunction c = GridFunction::sample(gamma.grid, [](double) { return 5.0; });
  CHECK(std::abs(fisher(c, gamma)) < 1e-20);
  CHECK(fisher(linear_probe(gamma.grid, 0.3), gamma) == doctest::Approx(0.09).epsilon(1e-10));
  const GridFunction h2 = GridFunction::sample(gamma.grid, [](double y) { return y * y - 1.0; });
  CHECK(fisher(h2, gamma) == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("deficit report on constants is borderline zero") {
  const auto& gamma = gamma1024();
  const GridFunction c = GridFunction::sample(gamma.grid, [](double) { return 1.0; });
  const DeficitReport r = deficit(c, 1.5, 1.0, gamma);
  CHECK(r.slack == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(r.verdict == "borderline");
}

TEST_CASE("deficit of the linear family has the sharp quartic coefficient") {
  const auto& gamma = gamma1024();
  for (double p : {1.1, 1.5, 1.9}) {
    // Richardson-style ratio over a dyadic eps sweep isolates the eps^4 term.
    const double d1 = deficit(linear_probe(gamma.grid, 0.02), p, 1.0, gamma).slack;
    const double d2 = deficit(linear_probe(gamma.grid, 0.04), p, 1.0, gamma).slack;
    CHECK(d2 / d1 == doctest::Approx(16.0).epsilon(0.02));
    const double coef = d1 / std::pow(0.02, 4);
    CHECK(coef == doctest::Approx(0.5 * (p - 1.0)).epsilon(0.01));
  }
}

TEST_CASE("interpolation inequality holds on random functions") {
  const auto& gamma = gamma1024();
  std::mt19937_64 rng(31);
  for (int k = 0; k < 50; ++k) {
    const GridFunction f = random_hermite_function(gamma.grid, rng);
    for (double p : {1.1, 1.5, 1.9})
      CHECK(deficit(f, p, 1.0, gamma).slack >= -1e-8);
  }
}

TEST_CASE("scaling and sign invariance of the functionals") {
  const auto& gamma = gamma1024();
  std::mt19937_64 rng(41);
  const GridFunction f = random_hermite_function(gamma.grid, rng);
  GridFunction neg = f, scaled = f;
  for (int i = 0; i < f.size(); ++i) {
    neg[i] = -f[i];
    scaled[i] = 3.0 * f[i];
  }
  const double p = 1.4;
  CHECK(fisher(neg, gamma) == doctest::Approx(fisher(f, gamma)).epsilon(1e-14));
  CHECK(entropy(neg, p, gamma) == doctest::Approx(entropy(f, p, gamma)).epsilon(1e-14));
  CHECK(fisher(scaled, gamma) == doctest::Approx(9.0 * fisher(f, gamma)).epsilon(1e-12));
  CHECK(entropy(scaled, p, gamma) == doctest::Approx(9.0 * entropy(f, p, gamma)).epsilon(1e-12));
}

TEST_CASE("log-Sobolev deficit vanishes on the extremal family") {
  const auto& gamma = gamma1024();
  const GridFunction c = GridFunction::sample(gamma.grid, [](double) { return 2.0; });
  CHECK(std::abs(logsob_deficit(c, gamma, 1.0).slack) < 1e-13);

  for (double eps : {0.05, 0.1}) {
    const GridFunction f = GridFunction::sample(
        gamma.grid, [eps](double y) { return std::exp(0.5 * eps * y); });
    const DeficitReport r = logsob_deficit(f, gamma, 1.0);
    CHECK(std::abs(r.slack) < 1e-6);
  }

  const GridFunction bad = GridFunction::sample(gamma.grid, [](double y) { return y; });
  CHECK_THROWS_AS(logsob_deficit(bad, gamma, 1.0), std::invalid_argument);
}

TEST_CASE("log-Sobolev inequality holds for mean-one perturbations") {
  const auto& gamma = gamma1024();
  std::mt19937_64 rng(53);
  for (int k = 0; k < 25; ++k) {
    GridFunction f = random_hermite_function(gamma.grid, rng, 6, 0.2, true);
    CHECK(logsob_deficit(f, gamma, 1.0).slack >= -1e-8);
  }
}

TEST_CASE("interpolation deficit converges to the log-Sobolev deficit at p->2") {
  const auto& gamma = gamma1024();
  const GridFunction f = GridFunction::sample(
      gamma.grid, [](double y) { return 1.0 + 0.3 * std::exp(-y * y); });
  const double target = logsob_deficit(f, gamma, 1.0).slack;
  const double at199 = deficit(f, 1.99, 1.0, gamma).slack;
  const double at1999 = deficit(f, 1.999, 1.0, gamma).slack;
  CHECK(std::abs(at1999 - target) < std::abs(at199 - target));
  CHECK(std::abs(at1999 - target) < 1e-4 * (1.0 + std::abs(target)));
}

TEST_CASE("pi1 projection splits Hermite components") {
  const auto& gamma = gamma1024();
  const GridFunction f = linear_probe(gamma.grid, 0.4);
  const auto [proj, res] = project_pi1(f, gamma);
  for (double v : res.values) CHECK(std::abs(v) < 1e-12);

  const GridFunction y2 = GridFunction::sample(gamma.grid, [](double y) { return y * y; });
  const auto [p2, r2] = project_pi1(y2, gamma);
  for (int i = 0; i < y2.size(); ++i) {
    CHECK(p2[i] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r2[i] == doctest::Approx(y2[i] - 1.0).epsilon(1e-8).scale(1.0 + std::abs(y2[i])));
  }
}

TEST_CASE("pi1 projection: Pythagoras and idempotency") {
  const auto& gamma = gamma1024();
  std::mt19937_64 rng(61);
  const GridFunction f = random_hermite_function(gamma.grid, rng);
  const auto [proj, res] = project_pi1(f, gamma);
  const double nf = lp_norm(f, 2.0, gamma), np = lp_norm(proj, 2.0, gamma),
               nr = lp_norm(res, 2.0, gamma);
  CHECK(nf * nf == doctest::Approx(np * np + nr * nr).epsilon(1e-10));

  const auto [pp, pr] = project_pi1(proj, gamma);
  for (int i = 0; i < f.size(); ++i)
    CHECK(pp[i] == doctest::Approx(proj[i]).epsilon(1e-12).scale(1.0 + std::abs(proj[i])));

  Grid1D grid(10.0, 512);
  std::vector<double> phi(512);
  for (int i = 0; i < 512; ++i) phi[i] = 0.5 * grid.node(i) * grid.node(i);
  const MeasureSpec nongauss = build_custom(phi, 1.0, grid);
  const GridFunction g = GridFunction::sample(grid, [](double y) { return y; });
  CHECK_THROWS_AS(project_pi1(g, nongauss), std::invalid_argument);
}

TEST_CASE("deficit report serializes to json") {
  const auto& gamma = gamma1024();
  const DeficitReport r = deficit(linear_probe(gamma.grid, 0.1), 1.5, 1.0, gamma);
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j.at("tag").get<std::string>() == "interpolation");
  CHECK(j.at("lhs").get<double>() == doctest::Approx(r.lhs));
  CHECK(j.at("rhs").get<double>() == doctest::Approx(r.rhs));
  CHECK(j.at("slack").get<double>() == doctest::Approx(r.slack));
  CHECK(j.at("verdict").get<std::string>() == r.verdict);
}
