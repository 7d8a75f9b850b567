#include "gaussflow/acceptance.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "gaussflow/atlas.hpp"
#include "gaussflow/bridge.hpp"
#include "gaussflow/flow.hpp"
#include "gaussflow/functionals.hpp"
#include "gaussflow/hermite.hpp"
#include "gaussflow/measure.hpp"
#include "gaussflow/stability.hpp"

namespace gaussflow::acceptance {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Fit {
  double slope;
  double intercept;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  if (workers <= 0)
    workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

GridFunction bump_function(const Grid1D& grid) {
  return GridFunction::sample(grid, [](double y) {
    return std::abs(y) < 1.0 ? std::exp(-1.0 / (1.0 - y * y)) : 0.0;
  });
}

std::vector<GridFunction> make_test_set(const Grid1D& grid,
                                        unsigned long long seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<GridFunction> set;
  set.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    set.push_back(random_hermite_function(grid, rng));
  return set;
}

/// Brute-force radial oracle for the transverse integral: |S^{a-1}| times
/// the 1-D integral compactified by r = s/(1-s), Simpson in s. The change of
/// variables integrates the algebraic tail without truncation.
double zeta_brute_force(double a, double b, double d) {
  const double surface =
      2.0 * std::pow(kPi, 0.5 * a) / std::tgamma(0.5 * a);
  const int m = 400000;  // intervals (even)
  const double h = 1.0 / m;
  double acc = 0.0;
  for (int i = 1; i < m; ++i) {
    const double s = h * i;
    const double r = s / (1.0 - s);
    const double val = std::exp((a - 1.0) * std::log(r) -
                                b * std::log1p(r * r / d)) /
                       ((1.0 - s) * (1.0 - s));
    acc += (i % 2 == 1 ? 4.0 : 2.0) * val;
  }
  return surface * acc * h / 3.0;
}

using Criterion = std::function<CriterionResult()>;

CriterionResult c01_atlas_exactness() {
  CriterionResult r{1, "atlas-exactness", false, "", 0.0};
  double worst = 0.0;
  for (double d : {3.0, 5.0, 10.0, 50.0}) {
    const auto m1 = atlas::m_pm_sphere(d, 1.0);
    worst = std::max({worst, std::abs(m1.first - 1.0),
                      std::abs(m1.second - 1.0)});
    const auto mc = atlas::m_pm_sphere(d, atlas::p_critical(d));
    const double target = (d - 1.0) / d;
    worst = std::max({worst, std::abs(mc.first - target),
                      std::abs(mc.second - target)});
    const auto ms = atlas::m_pm_sphere(d, atlas::p_sharp(d));
    worst = std::max(worst, std::abs(ms.second - 1.0));
  }
  worst = std::max(worst, std::abs(atlas::beta_pm(1.5).first - 2.0 / 3.0));
  for (double p : {1.1, 1.5, 1.9}) {
    worst = std::max(worst, std::abs(atlas::theta_of_beta(p, 1.0) - (p - 1.0)));
    const auto [blo, bhi] = atlas::beta_pm(p);
    worst = std::max({worst, std::abs(atlas::theta_of_beta(p, blo) - 1.0),
                      std::abs(atlas::theta_of_beta(p, bhi) - 1.0)});
  }
  r.pass = worst <= 1e-12;
  r.detail = "max_abs_err=" + fmt(worst);
  return r;
}

CriterionResult c02_large_d_convergence() {
  CriterionResult r{2, "large-d-parameter-convergence", false, "", 0.0};
  const std::vector<double> ds = {1e2, 1e3, 1e4, 1e5, 1e6};
  double worst_dev = 0.0;
  // Generic exponents: at p = 3/2 the plus-branch 1/d coefficient
  // (1-p) + sqrt((p-1)(2-p))(3p-4)/(2-p) vanishes and the gap decays like
  // 1/d^2, so the first-order rate is sampled away from that root.
  for (double p : {1.1, 1.4, 1.7, 1.9}) {
    const auto gauss = atlas::m_pm_gauss(p);
    std::vector<double> lx, ylo, yhi;
    for (double d : ds) {
      const auto sphere = atlas::m_pm_sphere(d, p);
      lx.push_back(std::log(d));
      ylo.push_back(std::log(std::abs(sphere.first - gauss.first)));
      yhi.push_back(std::log(std::abs(sphere.second - gauss.second)));
    }
    worst_dev = std::max(worst_dev,
                         std::abs(least_squares(lx, ylo).slope + 1.0));
    worst_dev = std::max(worst_dev,
                         std::abs(least_squares(lx, yhi).slope + 1.0));
  }
  r.pass = worst_dev <= 0.1;
  r.detail = "max_slope_dev=" + fmt(worst_dev);
  return r;
}

CriterionResult c03_gaussian_sweep(const Options& opt) {
  CriterionResult r{3, "gaussian-inequality-sweep", false, "", 0.0};
  const MeasureSpec gamma = build_gaussian(opt.grid_l, opt.grid_n);
  const auto set = make_test_set(gamma.grid, opt.seed, 200);
  double min_slack = 1e300;
  for (double p : {1.1, 1.5, 1.9})
    for (const auto& f : set)
      min_slack = std::min(min_slack, deficit(f, p, 1.0, gamma).slack);
  r.pass = min_slack >= -1e-8;
  r.detail = "min_slack=" + fmt(min_slack);
  return r;
}

CriterionResult c04_fourth_order_expansion(const Options& opt) {
  CriterionResult r{4, "sharp-fourth-order-expansion", false, "", 0.0};
  const MeasureSpec gamma = build_gaussian(opt.grid_l, opt.grid_n);
  bool ok = true;
  std::ostringstream detail;
  for (double p : {1.1, 1.5, 1.9}) {
    std::vector<double> lx, ldef, e2, def4, imp4;
    for (double eps = 0.02; eps <= 0.1 + 1e-12; eps += 0.01) {
      const GridFunction f = GridFunction::sample(
          gamma.grid, [eps](double y) { return 1.0 + eps * y; });
      const double def = deficit(f, p, 1.0, gamma).slack;
      const double imp = stability::improved_gap_phi(f, p, gamma).slack;
      lx.push_back(std::log(eps));
      ldef.push_back(std::log(def));
      e2.push_back(eps * eps);
      def4.push_back(def / std::pow(eps, 4));
      imp4.push_back(imp / std::pow(eps, 4));
    }
    const Fit fd = least_squares(lx, ldef);
    // The quartic coefficients come from slack/eps^4 regressed on eps^2,
    // which removes the next term of the expansion from the intercept.
    const double coef_def = least_squares(e2, def4).intercept;
    const double coef_imp = least_squares(e2, imp4).intercept;
    const double target_def = 0.5 * (p - 1.0);
    const double target_imp = 0.5 * (p - 1.0) * (p - 1.0);
    const bool here = std::abs(fd.slope - 4.0) <= 0.05 &&
                      std::abs(coef_def / target_def - 1.0) <= 0.05 &&
                      std::abs(coef_imp / target_imp - 1.0) <= 0.05;
    ok = ok && here;
    detail << "p=" << p << ":exp=" << std::setprecision(4) << fd.slope
           << ",c/c*=" << coef_def / target_def
           << ",ci/ci*=" << coef_imp / target_imp << " ";
  }
  r.pass = ok;
  r.detail = detail.str();
  return r;
}

CriterionResult c05_flow_conservation(const Options& opt) {
  CriterionResult r{5, "flow-conservation-monotonicity", false, "", 0.0};
  const MeasureSpec gamma = build_gaussian(opt.grid_l, opt.grid_n);
  const GridFunction w0 = GridFunction::sample(gamma.grid, [](double y) {
    return 1.0 + 0.1 * std::exp(-y * y) * std::cos(2.0 * y);
  });
  const std::vector<double> ps = {1.1, 1.3, 1.5, 1.7, 1.9};
  const std::vector<double> fracs = {0.1, 0.3, 0.5, 0.7, 0.9};
  struct RunOutcome {
    double drift = 0.0, increase = 0.0;
    bool clean = false;
  };
  std::vector<RunOutcome> outcomes(25);
  parallel_for(25, opt.workers, [&](int idx) {
    const double p = ps[static_cast<std::size_t>(idx / 5)];
    const auto [mlo, mhi] = atlas::m_pm_gauss(p);
    const double m =
        mlo + fracs[static_cast<std::size_t>(idx % 5)] * (mhi - mlo);
    const flow::FlowTrajectory traj = flow::run_flow(w0, p, m, gamma, 20.0);
    outcomes[static_cast<std::size_t>(idx)] = {
        traj.mass_drift(), traj.max_deficit_increase(),
        traj.floored_nodes == 0 && traj.boundary_flat};
  });
  double worst_drift = 0.0, worst_increase = 0.0;
  bool clean = true;
  for (const auto& o : outcomes) {
    worst_drift = std::max(worst_drift, o.drift);
    worst_increase = std::max(worst_increase, o.increase);
    clean = clean && o.clean;
  }
  r.pass = clean && worst_drift <= 1e-8 && worst_increase <= 1e-8;
  r.detail = "max_mass_drift=" + fmt(worst_drift) +
             " max_deficit_increase=" + fmt(worst_increase);
  return r;
}

CriterionResult c06_rate_identity(const Options& opt) {
  CriterionResult r{6, "carre-du-champ-identity", false, "", 0.0};
  const double p = 1.5, m = 1.0;
  double err_coarse = 0.0, err_fine = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    const int n = pass == 0 ? opt.grid_n / 2 : opt.grid_n;
    const MeasureSpec gamma = build_gaussian(opt.grid_l, n);
    std::mt19937_64 rng(opt.seed + 1);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const GridFunction w0 = random_flow_datum(gamma.grid, rng);
      const flow::RateCheck rc = flow::deficit_rate_check(w0, p, m, gamma);
      worst = std::max(worst, rc.relative_error);
    }
    (pass == 0 ? err_coarse : err_fine) = worst;
  }
  r.pass = err_fine <= 1e-3 && err_coarse / err_fine >= 4.0;
  r.detail = "err_n512=" + fmt(err_coarse) + " err_n1024=" + fmt(err_fine) +
             " ratio=" + fmt(err_coarse / std::max(err_fine, 1e-300));
  return r;
}

CriterionResult c07_counterexample(const Options& opt) {
  CriterionResult r{7, "counterexample-outside-region", false, "", 0.0};
  const MeasureSpec gamma = build_gaussian(opt.grid_l, opt.grid_n);
  const auto outside = flow::counterexample_search(1.5, 2.0, gamma);
  const auto inside = flow::counterexample_search(1.5, 1.2, gamma);
  r.pass = outside.found && outside.best_rate > 1e-6 &&
           inside.best_rate <= 1e-8;
  r.detail = "outside_rate=" + fmt(outside.best_rate) +
             " inside_rate=" + fmt(inside.best_rate);
  return r;
}

CriterionResult c08_dimension_bridge(const Options& opt) {
  CriterionResult r{8, "dimension-bridge", false, "", 0.0};
  double worst_zeta = 0.0;
  for (int n : {1, 2}) {
    for (double d : {5.0, 10.0, 30.0, 50.0}) {
      const double pairs[3][2] = {
          {d - n, d - 2.0}, {d - n, d}, {d, d}};
      for (const auto& ab : pairs) {
        const double exact = bridge::zeta_integral(ab[0], ab[1], d);
        const double brute = zeta_brute_force(ab[0], ab[1], d);
        worst_zeta = std::max(worst_zeta, std::abs(exact / brute - 1.0));
      }
    }
  }

  const double stirling =
      std::exp(bridge::log_zeta_integral(1e4 - 1.0, 1e4 - 2.0, 1e4) -
               bridge::log_c_d(1e4));
  const double stirling_dev =
      std::abs(stirling / (4.0 / std::sqrt(2.0 * kPi)) - 1.0);

  const MeasureSpec gamma = build_gaussian(opt.grid_l, opt.grid_n);
  const GridFunction v = bump_function(gamma.grid);
  std::vector<double> lx, ly;
  for (double d : {1e2, 1e3, 1e4, 1e5}) {
    const auto ev = bridge::sphere_functionals(v, 1, d, 1.5);
    lx.push_back(std::log(d));
    ly.push_back(std::log(std::abs(ev.combined - ev.gaussian_target)));
  }
  const double slope = least_squares(lx, ly).slope;

  r.pass = worst_zeta <= 1e-8 && stirling_dev <= 1e-3 &&
           std::abs(slope + 1.0) <= 0.1;
  r.detail = "zeta_err=" + fmt(worst_zeta) + " stirling_dev=" +
             fmt(stirling_dev) + " slope=" + fmt(slope);
  return r;
}

CriterionResult c09_logsob_limit(const Options& opt) {
  CriterionResult r{9, "log-sobolev-joint-limit", false, "", 0.0};
  const MeasureSpec gamma = build_gaussian(opt.grid_l, opt.grid_n);
  const GridFunction v = bump_function(gamma.grid);
  const double d = 1e4;
  const auto ev = bridge::logsob_bridge(v, d, 2.0 - 1.0 / d);
  const double rel =
      std::abs(ev.combined - ev.gaussian_target) / std::abs(ev.gaussian_target);
  r.pass = rel <= 1e-2;
  r.detail = "rel_err=" + fmt(rel);
  return r;
}

CriterionResult c10_eigenvalue(const Options& opt) {
  CriterionResult r{10, "eigenvalue-and-improved-lambda", false, "", 0.0};
  const MeasureSpec gamma = build_gaussian(opt.grid_l, opt.grid_n);
  const double l1_gauss = stability::poincare_lambda1(gamma);

  Grid1D grid(opt.grid_l, opt.grid_n);
  std::vector<double> phi(static_cast<std::size_t>(opt.grid_n));
  for (int i = 0; i < opt.grid_n; ++i) {
    const double y = grid.node(i);
    phi[static_cast<std::size_t>(i)] = 0.5 * y * y + 0.1 * std::cos(y);
  }
  const MeasureSpec mu = build_custom(std::move(phi), 0.9, grid);
  const double l1_pert = stability::poincare_lambda1(mu);

  const auto set = make_test_set(grid, opt.seed, 200);
  double min_slack = 1e300;
  for (double p : {1.1, 1.5, 1.9})
    min_slack =
        std::min(min_slack, stability::improved_lambda_check(mu, p, set).slack);

  r.pass = std::abs(l1_gauss - 1.0) <= 1e-6 && l1_pert >= 0.9 - 1e-9 &&
           min_slack >= -1e-8;
  r.detail = "lambda1_gauss=" + fmt(l1_gauss) + " lambda1_pert=" +
             fmt(l1_pert) + " min_slack=" + fmt(min_slack);
  return r;
}

CriterionResult c11_stability(const Options& opt) {
  CriterionResult r{11, "stability-end-to-end", false, "", 0.0};
  const MeasureSpec gamma = build_gaussian(opt.grid_l, opt.grid_n);
  double min_stab = 1e300, min_orth = 1e300;
  const int grid_pts = 21;
  for (double p : {1.1, 1.5, 1.9}) {
    std::vector<double> stab(grid_pts * grid_pts), orth(grid_pts * grid_pts);
    parallel_for(grid_pts * grid_pts, opt.workers, [&](int idx) {
      const double eps = 0.3 * (idx / grid_pts) / (grid_pts - 1);
      const double eta = 0.3 * (idx % grid_pts) / (grid_pts - 1);
      const GridFunction f =
          GridFunction::sample(gamma.grid, [eps, eta](double y) {
            return 1.0 + eps * y + eta * (y * y - 1.0);
          });
      stab[static_cast<std::size_t>(idx)] =
          stability::stability_check(f, 1, p, gamma).slack;
      orth[static_cast<std::size_t>(idx)] =
          stability::orth_improvement(f, p, gamma).slack;
    });
    for (double s : stab) min_stab = std::min(min_stab, s);
    for (double s : orth) min_orth = std::min(min_orth, s);
  }
  r.pass = min_stab >= 0.0 && min_orth >= -1e-10;
  r.detail = "min_thm_slack=" + fmt(min_stab) +
             " min_orth_slack=" + fmt(min_orth);
  return r;
}

CriterionResult c12_scalar_machinery() {
  CriterionResult r{12, "scalar-machinery", false, "", 0.0};
  bool ok = true;
  std::ostringstream detail;
  for (double p : {1.1, 1.5, 1.9}) {
    // psi''(0) by a Richardson-extrapolated second difference; the raw
    // quotient 2 psi(h)/h^2 carries an O(h) error, so the first-order
    // combination 2A(h) - A(2h) applies. Step scaled by (2-p)^2, the
    // curvature scale of psi near zero.
    const double h = 1e-4 * (2.0 - p) * (2.0 - p) / 0.25;
    const auto second = [p](double step) {
      return 2.0 * atlas::psi_func(p, step) / (step * step);
    };
    const double psi2 = 2.0 * second(h) - second(2.0 * h);
    const double psi2_exact = (p - 1.0) / (2.0 - p);
    const double psi2_rel = std::abs(psi2 / psi2_exact - 1.0);

    // The t -> infinity slope approaches p-1 like (2-p) t^{p-2}; t = 1e6
    // resolves it to 1e-3 for p <= 1.5, while p = 1.9 needs t = 1e27.
    const double t_large = p > 1.8 ? 1e27 : 1e6;
    const double slope_dev =
        std::abs(atlas::psi_func(p, t_large) / t_large - (p - 1.0));

    const double k1 = atlas::kappa_const(p, 601);
    const double k2 = atlas::kappa_const(p, 1201);
    const bool kappa_ok = k1 > 0.0 && std::abs(k1 - k2) <= 1e-8 * k1;

    const bool here = psi2_rel <= 1e-4 && slope_dev <= 1e-3 && kappa_ok;
    ok = ok && here;
    detail << "p=" << p << ":psi2_rel=" << fmt(psi2_rel)
           << ",slope_dev=" << fmt(slope_dev) << ",kappa=" << fmt(k1) << " ";
  }
  r.pass = ok;
  r.detail = detail.str();
  return r;
}

}  // namespace

std::vector<CriterionResult> run_all(const Options& opt, std::ostream* log) {
  const std::vector<std::pair<int, Criterion>> criteria = {
      {1, [&] { return c01_atlas_exactness(); }},
      {2, [&] { return c02_large_d_convergence(); }},
      {3, [&] { return c03_gaussian_sweep(opt); }},
      {4, [&] { return c04_fourth_order_expansion(opt); }},
      {5, [&] { return c05_flow_conservation(opt); }},
      {6, [&] { return c06_rate_identity(opt); }},
      {7, [&] { return c07_counterexample(opt); }},
      {8, [&] { return c08_dimension_bridge(opt); }},
      {9, [&] { return c09_logsob_limit(opt); }},
      {10, [&] { return c10_eigenvalue(opt); }},
      {11, [&] { return c11_stability(opt); }},
      {12, [&] { return c12_scalar_machinery(); }},
  };
  std::vector<CriterionResult> results;
  results.reserve(criteria.size());
  for (const auto& [id, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult res;
    try {
      res = fn();
    } catch (const std::exception& ex) {
      res.id = id;
      res.name = "criterion-" + std::to_string(id);
      res.pass = false;
      res.detail = std::string("exception: ") + ex.what();
    }
    res.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (log)
      *log << "criterion " << std::setw(2) << std::setfill('0') << res.id
           << std::setfill(' ') << " [" << res.name << "] "
           << (res.pass ? "PASS" : "FAIL") << " (" << std::fixed
           << std::setprecision(1) << res.seconds << "s) " << res.detail
           << "\n"
           << std::flush;
    results.push_back(std::move(res));
  }
  return results;
}

bool all_pass(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace gaussflow::acceptance
