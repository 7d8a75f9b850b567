#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "gaussflow/atlas.hpp"
#include "gaussflow/functionals.hpp"
#include "gaussflow/hermite.hpp"
#include "gaussflow/measure.hpp"
#include "gaussflow/stability.hpp"

using namespace gaussflow;

namespace {

const MeasureSpec& gamma1024() {
  static const MeasureSpec g = build_gaussian(10.0, 1024);
  return g;
}

GridFunction linear_probe(const Grid1D& grid, double eps) {
  return GridFunction::sample(grid, [eps](double y) { return 1.0 + eps * y; });
}

std::vector<GridFunction> positive_set(const Grid1D& grid, int count,
                                       unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::vector<GridFunction> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i)
    out.push_back(random_hermite_function(grid, rng, 8, 0.3, true));
  return out;
}

}  // namespace

TEST_CASE("phi-improvement: equality at constants, forms agree") {
  const auto& gamma = gamma1024();
  const GridFunction c = GridFunction::sample(gamma.grid, [](double) { return 1.0; });
  const auto rc = stability::improved_gap_phi(c, 1.5, gamma);
  CHECK(std::abs(rc.slack) < 1e-13);

  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    const GridFunction f = random_hermite_function(gamma.grid, rng);
    for (double p : {1.2, 1.7}) {
      const auto [phi_form, norms_form] = stability::phi_remainder_forms(f, p, gamma);
      CHECK(phi_form == doctest::Approx(norms_form).epsilon(1e-10));
      CHECK(norms_form >= -1e-12);  // the remainder itself is nonnegative
      // chain of strength: deficit >= remainder
      CHECK(deficit(f, p, 1.0, gamma).slack >= norms_form - 1e-10);
    }
  }
}

TEST_CASE("phi-improvement quartic coefficient on the linear family") {
  const auto& gamma = gamma1024();
  for (double p : {1.1, 1.5, 1.9}) {
    const double s1 = stability::improved_gap_phi(linear_probe(gamma.grid, 0.02), p, gamma).slack;
    const double s2 = stability::improved_gap_phi(linear_probe(gamma.grid, 0.04), p, gamma).slack;
    CHECK(s2 / s1 == doctest::Approx(16.0).epsilon(0.03));
    CHECK(s1 / std::pow(0.02, 4) ==
          doctest::Approx(0.5 * (p - 1.0) * (p - 1.0)).epsilon(0.02));
  }
}

TEST_CASE("phi-improvement holds on random positive functions") {
  const auto& gamma = gamma1024();
  for (const auto& f : positive_set(gamma.grid, 50, 77))
    for (double p : {1.1, 1.5, 1.9})
      CHECK(stability::improved_gap_phi(f, p, gamma).slack >= -1e-8);
}

TEST_CASE("chi-improvement: window edges and consistency") {
  const auto& gamma = gamma1024();
  const GridFunction c = GridFunction::sample(gamma.grid, [](double) { return 2.0; });
  CHECK(std::abs(stability::improved_gap_chi(c, 1.5, 1.0, gamma).slack) < 1e-12);

  std::mt19937_64 rng(8);
  for (int k = 0; k < 20; ++k) {
    const GridFunction f = random_hermite_function(gamma.grid, rng);
    const double p = 1.5;
    // at beta = 1 the chi bound is the (1-b)-normalized member of the same
    // family and is dominated by the phi bound
    const auto chi1 = stability::improved_gap_chi(f, p, 1.0, gamma);
    const auto phi = stability::improved_gap_phi(f, p, gamma);
    CHECK(chi1.rhs <= phi.rhs + 1e-12);
    CHECK(chi1.slack >= -1e-8);

    // at beta = beta_plus, delta = 0 collapses chi to chi(s) = s, which is
    // the plain inequality scaled by (2-p)
    const double bhi = atlas::beta_pm(p).second;
    const auto chitop = stability::improved_gap_chi(f, p, bhi, gamma);
    CHECK(chitop.rhs ==
          doctest::Approx((2.0 - p) * entropy(f, p, gamma)).epsilon(1e-9));
    CHECK(chitop.slack >= -1e-8);
  }
  const GridFunction f = linear_probe(gamma.grid, 0.1);
  CHECK_THROWS_AS(stability::improved_gap_chi(f, 1.5, 2.5, gamma),
                  std::invalid_argument);
}

TEST_CASE("fourth-order bounds: constants, linear family, random sweep") {
  const auto& gamma = gamma1024();
  const GridFunction c = GridFunction::sample(gamma.grid, [](double) { return 1.0; });
  const auto [psi_c, kappa_c] = stability::fourth_order_bound(c, 1.5, gamma);
  CHECK(std::abs(psi_c.slack) < 1e-13);
  CHECK(std::abs(kappa_c.slack) < 1e-13);

  for (double p : {1.2, 1.5, 1.8}) {
    double prev_psi = -1.0, prev_kappa = -1.0;
    for (double eps : {0.02, 0.04, 0.08}) {
      const auto [psi_r, kappa_r] =
          stability::fourth_order_bound(linear_probe(gamma.grid, eps), p, gamma);
      CHECK(psi_r.slack >= -1e-10);
      CHECK(kappa_r.slack >= -1e-10);
      if (prev_psi > 0.0) {
        // slack decays like eps^4 towards zero: dyadic ratio near 16
        CHECK(psi_r.slack / prev_psi == doctest::Approx(16.0).epsilon(0.25));
        CHECK(kappa_r.slack / prev_kappa == doctest::Approx(16.0).epsilon(0.25));
      }
      prev_psi = psi_r.slack;
      prev_kappa = kappa_r.slack;
    }
  }

  for (const auto& f : positive_set(gamma.grid, 50, 91)) {
    for (double p : {1.1, 1.5, 1.9}) {
      const auto [psi_r, kappa_r] = stability::fourth_order_bound(f, p, gamma);
      CHECK(psi_r.slack >= -1e-8);
      CHECK(kappa_r.slack >= -1e-8);
    }
  }
}

TEST_CASE("orthogonality improvement") {
  const auto& gamma = gamma1024();
  const auto on_linear = stability::orth_improvement(linear_probe(gamma.grid, 0.2), 1.5, gamma);
  CHECK(on_linear.rhs < 1e-15);
  CHECK(on_linear.lhs >= 0.0);

  // quadratic family: both sides quadratic in eta with ratio 1/(2-p)
  for (double p : {1.2, 1.6}) {
    const double eta = 0.01;
    const GridFunction f = GridFunction::sample(
        gamma.grid, [eta](double y) { return 1.0 + eta * (y * y - 1.0); });
    const auto r = stability::orth_improvement(f, p, gamma);
    CHECK(r.lhs / r.rhs == doctest::Approx(1.0 / (2.0 - p)).epsilon(0.02));
    CHECK(r.lhs >= r.rhs);
  }

  for (const auto& f : positive_set(gamma.grid, 50, 13))
    for (double p : {1.1, 1.5, 1.9})
      CHECK(stability::orth_improvement(f, p, gamma).slack >= -1e-8);

  Grid1D grid(10.0, 512);
  std::vector<double> phi(512);
  for (int i = 0; i < 512; ++i) phi[i] = 0.5 * grid.node(i) * grid.node(i);
  const MeasureSpec nongauss = build_custom(phi, 1.0, grid);
  const GridFunction g = GridFunction::sample(grid, [](double y) { return 1.0 + 0.1 * y; });
  CHECK_THROWS_AS(stability::orth_improvement(g, 1.5, nongauss), std::invalid_argument);
}

TEST_CASE("Poincare eigenvalue of the OU generator") {
  const MeasureSpec gamma = build_gaussian(10.0, 512);
  CHECK(stability::poincare_lambda1(gamma) == doctest::Approx(1.0).epsilon(1e-6));

  // scaled harmonic potential: spectral gap equals the curvature
  Grid1D grid(10.0, 512);
  for (double a : {0.5, 2.0}) {
    std::vector<double> phi(512);
    for (int i = 0; i < 512; ++i) phi[i] = 0.5 * a * grid.node(i) * grid.node(i);
    const MeasureSpec mu = build_custom(phi, a, grid);
    CHECK(stability::poincare_lambda1(mu) == doctest::Approx(a).epsilon(1e-6));
  }

  // perturbed cosine: the gap stays above the convexity bound
  std::vector<double> phi(512);
  for (int i = 0; i < 512; ++i) {
    const double y = grid.node(i);
    phi[i] = 0.5 * y * y + 0.1 * std::cos(y);
  }
  const MeasureSpec mu = build_custom(phi, 0.9, grid);
  CHECK(stability::poincare_lambda1(mu) >= 0.9);
}

TEST_CASE("improved-lambda inequality on a test set") {
  Grid1D grid(10.0, 512);
  std::vector<double> phi(512);
  for (int i = 0; i < 512; ++i) {
    const double y = grid.node(i);
    phi[i] = 0.5 * y * y + 0.1 * std::cos(y);
  }
  const MeasureSpec mu = build_custom(phi, 0.9, grid);
  const double l1 = stability::poincare_lambda1(mu);
  CHECK(atlas::lambda_combined(1.5, l1, 0.9) > 0.9);

  const auto set = positive_set(grid, 40, 101);
  for (double p : {1.1, 1.5, 1.9})
    CHECK(stability::improved_lambda_check(mu, p, set).slack >= -1e-8);

  // at the Gaussian the improvement degenerates to the sharp constant
  const MeasureSpec gamma = build_gaussian(10.0, 512);
  const double lg = stability::poincare_lambda1(gamma);
  CHECK(atlas::lambda_combined(1.5, lg, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("stability breakdown: gradient split and sharp directions") {
  const auto& gamma = gamma1024();
  const GridFunction c = GridFunction::sample(gamma.grid, [](double) { return 1.0; });
  const auto sc = stability::stability_check(c, 1, 1.5, gamma);
  CHECK(sc.deficit == 0.0);
  CHECK(sc.rhs == 0.0);
  CHECK(sc.slack == 0.0);

  for (double eps : {0.05, 0.1, 0.2}) {
    const auto sb = stability::stability_check(linear_probe(gamma.grid, eps), 1, 1.5, gamma);
    CHECK(sb.slack >= 0.0);
    CHECK(sb.residual_fisher + sb.pi1_fisher ==
          doctest::Approx(sb.fisher_total).epsilon(1e-10));
    CHECK(sb.pi1_fisher == doctest::Approx(eps * eps).epsilon(1e-4));
  }

  const auto j = nlohmann::json::parse(
      stability::stability_check(linear_probe(gamma.grid, 0.1), 1, 1.5, gamma).to_json());
  CHECK(j.contains("deficit"));
  CHECK(j.contains("residual_fisher"));
  CHECK(j.contains("pi1_fisher"));
  CHECK(j.contains("slack"));
}

TEST_CASE("stability holds across the mixed family") {
  const auto& gamma = gamma1024();
  for (double p : {1.1, 1.9}) {
    for (double eps : {0.0, 0.15, 0.3}) {
      for (double eta : {0.0, 0.15, 0.3}) {
        const GridFunction f = GridFunction::sample(
            gamma.grid, [eps, eta](double y) { return 1.0 + eps * y + eta * (y * y - 1.0); });
        CHECK(stability::stability_check(f, 1, p, gamma).slack >= 0.0);
      }
    }
  }
}

TEST_CASE("gaussian ball tail against its asymptotic") {
  const auto tc = stability::gaussian_ball_tail(0.1, 1);
  // Mills-ratio correction: the relative gap is about 4 eps^2
  CHECK(tc.relative_error <= 4.5 * 0.1 * 0.1);
  CHECK(tc.numeric ==
        doctest::Approx(std::erfc(5.0 / std::sqrt(2.0))).epsilon(1e-6));
  CHECK(tc.asymptotic > tc.numeric);  // the leading term overshoots
}

TEST_CASE("proof probes select the right branch") {
  const auto& gamma = gamma1024();

  // far branch: a strongly oscillating normalized function
  GridFunction far = GridFunction::sample(gamma.grid, [](double y) {
    return 1.0 + 0.8 * std::sin(2.0 * y) * std::exp(-y * y / 8.0);
  });
  const double nf = lp_norm(far, 2.0, gamma);
  for (double& v : far.values) v /= nf;
  const auto probe_far = stability::proof_probes(far, 1.5, 0.5, 0.4, gamma);
  CHECK(probe_far.branch == 1);
  CHECK(probe_far.bound_holds);

  // near-optimizer branch: the linear family
  GridFunction lin = linear_probe(gamma.grid, 0.1);
  const double nl = lp_norm(lin, 2.0, gamma);
  for (double& v : lin.values) v /= nl;
  const auto probe_lin = stability::proof_probes(lin, 1.5, 0.5, 0.4, gamma);
  CHECK(probe_lin.branch == 3);
  CHECK(probe_lin.mean_window_ok);
  CHECK(probe_lin.eps == doctest::Approx(0.1).epsilon(0.05));
  CHECK(probe_lin.bound_holds);

  // residual-dominated branch: a pure Hermite-2 perturbation
  GridFunction quad = GridFunction::sample(
      gamma.grid, [](double y) { return 1.0 + 0.05 * (y * y - 1.0); });
  const double nq = lp_norm(quad, 2.0, gamma);
  for (double& v : quad.values) v /= nq;
  const auto probe_quad = stability::proof_probes(quad, 1.5, 0.5, 0.4, gamma);
  CHECK(probe_quad.branch == 2);
  CHECK(probe_quad.bound_holds);

  CHECK_THROWS_AS(
      stability::proof_probes(linear_probe(gamma.grid, 0.1), 1.5, 0.5, 0.4, gamma),
      std::invalid_argument);
}

TEST_CASE("proof probes report a bounded Taylor band") {
  const auto& gamma = gamma1024();
  for (double eps : {0.05, 0.1}) {
    GridFunction f = GridFunction::sample(gamma.grid, [eps](double y) {
      return 1.0 + eps * y + 0.15 * eps * eps * (y * y - 1.0);
    });
    const double n2 = lp_norm(f, 2.0, gamma);
    for (double& v : f.values) v /= n2;
    const auto probe = stability::proof_probes(f, 1.5, 0.5, 0.4, gamma);
    CHECK(probe.branch == 3);
    CHECK(probe.bound_holds);
    CHECK(std::abs(probe.taylor_band) < 50.0);
  }
}
