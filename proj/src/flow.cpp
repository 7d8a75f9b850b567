#include "gaussflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "gaussflow/atlas.hpp"
#include "gaussflow/derivatives.hpp"
#include "gaussflow/functionals.hpp"
#include "gaussflow/hermite.hpp"

namespace gaussflow::flow {

namespace {

void require_positive(const std::vector<double>& w, const char* where) {
  for (double v : w)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string(where) +
                                  ": w must be strictly positive and finite");
}

/// Flux-form right-hand side evaluator with preallocated scratch.
class RhsEvaluator {
 public:
  RhsEvaluator(const MeasureSpec& mu, double p, double beta)
      : mu_(mu),
        dy_(mu.grid.spacing()),
        beta_(beta),
        kappa_(atlas::kappa_of_beta(p, beta)),
        mass_exp_(beta * p) {}

  void operator()(const std::vector<double>& w, std::vector<double>& out) {
    const std::size_t n = w.size();
    d1_.resize(n);
    g_.resize(n);
    wr_.resize(n);
    derivative_values(w, dy_, d1_);
    const bool linear = beta_ == 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double lw = std::log(w[i]);
      const double wk = std::exp(kappa_ * lw);
      g_[i] = mu_.weight[i] * wk * d1_[i];
      wr_[i] = linear ? 1.0 / wk : std::exp((1.0 - mass_exp_) * lw);
    }
    derivative_values(g_, dy_, dg_);
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      out[i] = wr_[i] * dg_[i] / mu_.weight[i];
  }

  double diffusivity_max(double wmin, double wmax) const {
    const double e = 2.0 - 2.0 * beta_;
    return std::max(std::pow(wmin, e), std::pow(wmax, e));
  }

 private:
  const MeasureSpec& mu_;
  double dy_, beta_, kappa_, mass_exp_;
  std::vector<double> d1_, g_, dg_, wr_;
};

struct SampledFunctionals {
  double mass, entropy, fisher, deficit;
};

SampledFunctionals sample_functionals(const std::vector<double>& w,
                                      double p, double beta,
                                      const MeasureSpec& mu) {
  const std::size_t n = w.size();
  std::vector<double> v(n);
  if (beta == 1.0)
    v = w;
  else
    for (std::size_t i = 0; i < n; ++i) v[i] = std::pow(w[i], beta);
  GridFunction vf(mu.grid, std::move(v));
  const double n2 = lp_norm(vf, 2.0, mu);
  const double np = lp_norm(vf, p, mu);
  SampledFunctionals s{};
  s.mass = std::pow(np, p);
  s.entropy = (n2 * n2 - np * np) / (2.0 - p);
  s.fisher = fisher(vf, mu);
  s.deficit = s.fisher - mu.lambda_star * s.entropy;
  return s;
}

}  // namespace

double FlowTrajectory::mass_drift() const {
  if (mass.empty()) return 0.0;
  const double m0 = mass.front();
  double worst = 0.0;
  for (double m : mass) worst = std::max(worst, std::abs(m / m0 - 1.0));
  return worst;
}

double FlowTrajectory::max_deficit_increase() const {
  double worst = 0.0;
  for (std::size_t i = 1; i < deficit.size(); ++i)
    worst = std::max(worst, deficit[i] - deficit[i - 1]);
  return worst;
}

GridFunction flow_rhs(const GridFunction& w, double p, double beta,
                      const MeasureSpec& mu) {
  require_same_grid(w.grid, mu.grid, "flow_rhs");
  require_positive(w.values, "flow_rhs");
  const double kappa = atlas::kappa_of_beta(p, beta);
  GridFunction lw = apply_OU(w, mu);
  GridFunction d1 = derivative(w);
  GridFunction out = w;
  for (int i = 0; i < w.size(); ++i) {
    const double nonlin = kappa * d1[i] * d1[i] / w[i];
    out[i] = std::pow(w[i], 2.0 - 2.0 * beta) * (lw[i] + nonlin);
  }
  return out;
}

QBetaBreakdown q_beta(const GridFunction& w, double p, double beta,
                      const MeasureSpec& mu) {
  require_same_grid(w.grid, mu.grid, "q_beta");
  require_positive(w.values, "q_beta");
  const double kappa = atlas::kappa_of_beta(p, beta);
  const double a = kappa + beta - 1.0;  // = beta (p-1)
  QBetaBreakdown q;
  q.delta = atlas::delta(p, beta);

  const std::size_t n = w.values.size();
  const double dy = w.grid.spacing();
  std::vector<double> d1(n), d2(n), phi2(n);
  derivative_values(w.values, dy, d1);
  second_derivative_values(w.values, dy, d2);
  second_derivative_values(mu.phi, dy, phi2);

  std::vector<double> hess_sq(n), quart(n), lw_sq(n), cross(n), grad_sq(n),
      curv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double grad2 = d1[i] * d1[i];
    const double ratio = grad2 / w.values[i];
    const double lw = d2[i] - mu.phi_prime[i] * d1[i];
    const double centered = d2[i] - a * ratio;
    hess_sq[i] = centered * centered;
    quart[i] = ratio * ratio;
    lw_sq[i] = lw * lw;
    cross[i] = lw * ratio;
    grad_sq[i] = grad2;
    curv[i] = (phi2[i] - mu.lambda_star) * grad2;
  }
  const auto quad = [&](const std::vector<double>& vals) {
    return weighted_trapezoid(vals, mu.weight, dy) / mu.Z;
  };
  q.hess_term = quad(hess_sq);
  q.quartic_term = quad(quart);
  q.curvature_excess = quad(curv);
  q.expanded = quad(lw_sq) + a * quad(cross) +
               kappa * (beta - 1.0) * quad(quart) -
               mu.lambda_star * quad(grad_sq);
  q.sum_of_squares = q.delta >= 0.0
                         ? q.hess_term + q.delta * q.quartic_term
                         : std::numeric_limits<double>::quiet_NaN();
  return q;
}

FlowTrajectory run_flow(const GridFunction& w0, double p, double m,
                        const MeasureSpec& mu, double t_final,
                        const FlowControls& controls) {
  require_same_grid(w0.grid, mu.grid, "run_flow");
  require_positive(w0.values, "run_flow");
  if (!(p >= 1.0) || !(p < 2.0))
    throw std::invalid_argument("run_flow: need 1 <= p < 2");
  if (!(t_final > 0.0))
    throw std::invalid_argument("run_flow: t_final must be positive");
  const double beta = atlas::beta_from_m(p, m);
  if (!(beta > 0.0))
    throw std::invalid_argument("run_flow: beta(p, m) must be positive");

  const std::size_t n = w0.values.size();
  const double dy = mu.grid.spacing();
  const double dy2 = dy * dy;
  RhsEvaluator rhs(mu, p, beta);

  std::vector<double> w = w0.values;
  std::vector<double> k1, k2, k3, k4, stage(n);
  FlowTrajectory traj;

  // The evolution spreads perturbations over the whole domain, so the raw
  // gradient at the edge does not stay small; what must stay inert is the
  // measure-weighted flux e^{-phi} w' that enters every integration by parts.
  const auto check_boundary = [&](const std::vector<double>& state) {
    std::vector<double> d1;
    derivative_values(state, dy, d1);
    const std::size_t edge = 4;
    for (std::size_t i = 0; i < edge; ++i)
      if (mu.weight[i] * std::abs(d1[i]) > controls.boundary_tol ||
          mu.weight[n - 1 - i] * std::abs(d1[n - 1 - i]) >
              controls.boundary_tol)
        return false;
    return true;
  };

  const auto record = [&](double t, double dt_used) {
    const SampledFunctionals s = sample_functionals(w, p, beta, mu);
    traj.times.push_back(t);
    traj.mass.push_back(s.mass);
    traj.entropy.push_back(s.entropy);
    traj.fisher.push_back(s.fisher);
    traj.deficit.push_back(s.deficit);
    const QBetaBreakdown q = q_beta(GridFunction(mu.grid, w), p, beta, mu);
    traj.q_beta.push_back(q.expanded);
    traj.dt_history.push_back(dt_used);
    if (!check_boundary(w)) traj.boundary_flat = false;
  };

  double t = 0.0;
  record(0.0, 0.0);
  double next_record = controls.record_interval;

  while (t < t_final) {
    const auto [wmin_it, wmax_it] = std::minmax_element(w.begin(), w.end());
    if (!(*wmin_it > 0.0))
      throw std::runtime_error("run_flow: positivity lost despite flooring");
    double dt = controls.dt_safety * dy2 /
                rhs.diffusivity_max(*wmin_it, *wmax_it);
    if (!(dt > 1e-14))
      throw std::runtime_error("run_flow: step size underflow");
    dt = std::min(dt, t_final - t);

    rhs(w, k1);
    for (std::size_t i = 0; i < n; ++i) stage[i] = w[i] + 0.5 * dt * k1[i];
    rhs(stage, k2);
    for (std::size_t i = 0; i < n; ++i) stage[i] = w[i] + 0.5 * dt * k2[i];
    rhs(stage, k3);
    for (std::size_t i = 0; i < n; ++i) stage[i] = w[i] + dt * k3[i];
    rhs(stage, k4);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (w[i] < controls.w_floor) {
        w[i] = controls.w_floor;
        ++traj.floored_nodes;
      }
    }
    t += dt;
    if (t >= next_record || t >= t_final) {
      record(t, dt);
      while (next_record <= t) next_record += controls.record_interval;
    }
  }
  traj.final_state = w;
  return traj;
}

RateCheck deficit_rate_check(const GridFunction& w0, double p, double m,
                             const MeasureSpec& mu,
                             const FlowControls& controls) {
  require_same_grid(w0.grid, mu.grid, "deficit_rate_check");
  require_positive(w0.values, "deficit_rate_check");
  const double beta = atlas::beta_from_m(p, m);
  const std::size_t n = w0.values.size();
  const double dy2 = mu.grid.spacing() * mu.grid.spacing();
  RhsEvaluator rhs(mu, p, beta);

  const auto [wmin_it, wmax_it] =
      std::minmax_element(w0.values.begin(), w0.values.end());
  const double dt =
      controls.dt_safety * dy2 / rhs.diffusivity_max(*wmin_it, *wmax_it);

  const auto rk4_step = [&](const std::vector<double>& win, double h) {
    std::vector<double> k1, k2, k3, k4, stage(n), out(n);
    rhs(win, k1);
    for (std::size_t i = 0; i < n; ++i) stage[i] = win[i] + 0.5 * h * k1[i];
    rhs(stage, k2);
    for (std::size_t i = 0; i < n; ++i) stage[i] = win[i] + 0.5 * h * k2[i];
    rhs(stage, k3);
    for (std::size_t i = 0; i < n; ++i) stage[i] = win[i] + h * k3[i];
    rhs(stage, k4);
    for (std::size_t i = 0; i < n; ++i)
      out[i] = win[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
  };

  const std::vector<double> w_full = rk4_step(w0.values, dt);
  const std::vector<double> w_half = rk4_step(w0.values, 0.5 * dt);

  const double d0 = sample_functionals(w0.values, p, beta, mu).deficit;
  const double d1 = sample_functionals(w_full, p, beta, mu).deficit;

  RateCheck rc;
  rc.numeric_rate = (d1 - d0) / dt;
  const QBetaBreakdown q =
      q_beta(GridFunction(mu.grid, w_half), p, beta, mu);
  rc.predicted_rate = -2.0 * beta * beta * q.expanded;
  rc.relative_error = std::abs(rc.numeric_rate - rc.predicted_rate) /
                      std::max(std::abs(rc.predicted_rate), 1e-300);
  return rc;
}

CounterexampleResult counterexample_search(double p, double m,
                                           const MeasureSpec& mu,
                                           int family_size) {
  CounterexampleResult res;
  if (std::abs(p - 1.0) < 1e-12) {
    res.status =
        "skipped: at p = 1 the admissible window collapses to m = 1 and the "
        "discriminant analysis is degenerate";
    return res;
  }
  const double beta = atlas::beta_from_m(p, m);
  res.searched = true;

  // The flat direction of the dissipation quadratic form is the Poincare
  // eigenfunction y, so the family must contain it un-enveloped: along
  // 1 + a y the dissipation is (kappa(beta-1)+kappa+beta-1) a^4 + O(a^6),
  // which changes sign outside the admissible window. The second parameter
  // adds an even Hermite bump for mixed data.
  const Grid1D& grid = mu.grid;
  const auto make_datum = [&](double a, double b) {
    return GridFunction::sample(grid, [&](double y) {
      return 1.0 + a * y + b * hermite(2, y) * std::exp(-0.25 * y * y);
    });
  };

  const double floor = 0.01;
  const auto rate_at = [&](double a, double b) {
    const GridFunction w = make_datum(a, b);
    const double wmin = *std::min_element(w.values.begin(), w.values.end());
    if (wmin < floor) return -std::numeric_limits<double>::infinity();
    const QBetaBreakdown q = q_beta(w, p, beta, mu);
    return -2.0 * beta * beta * q.expanded;
  };

  int evals = 0;
  double best_a = 0.0, best_b = 0.0, best_rate = rate_at(0.0, 0.0);
  ++evals;

  // Coarse scan, then coordinate refinement.
  for (double a = -0.096; a <= 0.0961 && evals < family_size; a += 0.016) {
    for (double b : {-0.9, -0.45, 0.0, 0.45, 0.9}) {
      if (evals >= family_size) break;
      const double r = rate_at(a, b);
      ++evals;
      if (r > best_rate) {
        best_rate = r;
        best_a = a;
        best_b = b;
      }
    }
  }
  double step = 0.02;
  while (step > 1e-4 && evals + 4 <= family_size) {
    bool improved = false;
    const double ca = best_a, cb = best_b;
    const std::pair<double, double> moves[4] = {
        {step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}};
    for (const auto& [da, db] : moves) {
      const double r = rate_at(ca + da, cb + db);
      ++evals;
      if (r > best_rate) {
        best_rate = r;
        best_a = ca + da;
        best_b = cb + db;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }

  res.best_a = best_a;
  res.best_b = best_b;
  res.best_rate = best_rate;
  res.evaluations = evals;
  res.found = best_rate > 1e-6;
  res.best_datum = make_datum(best_a, best_b).values;
  res.status = res.found ? "positive initial deficit slope found"
                         : "no positive slope in the search family";
  return res;
}

}  // namespace gaussflow::flow
