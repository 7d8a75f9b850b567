#pragma once

#include <string>
#include <vector>

#include "gaussflow/grid.hpp"
#include "gaussflow/measure.hpp"

namespace gaussflow::flow {

struct FlowControls {
  double dt_safety = 0.2;        // dt = dt_safety * dy^2 / max(w^{2-2beta})
  double record_interval = 0.05; // time between recorded samples
  double w_floor = 1e-10;        // positivity floor
  double boundary_tol = 1e-12;   // e^{-phi} |w'| bound at the outer 4 nodes
};

/// Time series of the conserved mass and of the entropy machinery evaluated
/// on v = w^beta, recorded at a fixed time stride along a run.
struct FlowTrajectory {
  std::vector<double> times;
  std::vector<double> mass;      // integral of w^{beta p} dmu
  std::vector<double> entropy;   // E[v]
  std::vector<double> fisher;    // I[v]
  std::vector<double> deficit;   // I[v] - lambda_star E[v]
  std::vector<double> q_beta;    // dissipation (deficit' = -2 beta^2 q_beta)
  std::vector<double> dt_history;
  std::vector<double> final_state;
  long floored_nodes = 0;   // flooring invalidates monotonicity verdicts
  bool boundary_flat = true;

  double mass_drift() const;            // max relative deviation from mass(0)
  double max_deficit_increase() const;  // largest upward step, 0 if monotone
};

/// Right-hand side of the w-flow: w^{2-2beta} (L w + kappa |w'|^2 / w) with
/// kappa = beta(p-2)+1, assembled from apply_OU and derivative.
GridFunction flow_rhs(const GridFunction& w, double p, double beta,
                      const MeasureSpec& mu);

/// The dissipation functional and its algebraically equivalent forms.
/// expanded = sum_of_squares + curvature_excess up to discretization error;
/// sum_of_squares is only defined for delta >= 0 (NaN outside).
struct QBetaBreakdown {
  double delta = 0.0;
  double sum_of_squares = 0.0;
  double hess_term = 0.0;     // integral of (w'' - beta(p-1) w'^2/w)^2
  double quartic_term = 0.0;  // integral of w'^4 / w^2
  double expanded = 0.0;      // (Lw)^2 + ... - lambda_star |w'|^2 form
  double curvature_excess = 0.0;  // integral of (phi'' - lambda_star) w'^2
};

QBetaBreakdown q_beta(const GridFunction& w, double p, double beta,
                      const MeasureSpec& mu);

/// Integrate the flow to t_final. The stepper advances the flux form
/// w^{1-beta p} rho^{-1} (rho w^kappa w')' of the same right-hand side, which
/// conserves the discrete mass to machine precision; RK4 in time with the
/// diffusion-limited adaptive step from FlowControls.
FlowTrajectory run_flow(const GridFunction& w0, double p, double m,
                        const MeasureSpec& mu, double t_final,
                        const FlowControls& controls = {});

struct RateCheck {
  double numeric_rate = 0.0;    // centered difference of the deficit
  double predicted_rate = 0.0;  // -2 beta^2 q_beta at the half step
  double relative_error = 0.0;
};

/// Verifies d/dt(deficit) = -2 beta^2 Q_beta[w] over one small step.
RateCheck deficit_rate_check(const GridFunction& w0, double p, double m,
                             const MeasureSpec& mu,
                             const FlowControls& controls = {});

struct CounterexampleResult {
  bool searched = false;
  bool found = false;      // best_rate > 1e-6
  double best_a = 0.0;     // He2 bump amplitude
  double best_b = 0.0;     // He3 bump amplitude
  double best_rate = 0.0;  // d/dt(deficit) at t = 0 for the best datum
  int evaluations = 0;
  std::string status;
  std::vector<double> best_datum;
};

/// Searches the two-parameter family 1 + (a He2 + b He3) exp(-y^2/4) for an
/// initial datum with positive initial deficit slope. A negative outcome is
/// reported, not thrown.
CounterexampleResult counterexample_search(double p, double m,
                                           const MeasureSpec& mu,
                                           int family_size = 200);

}  // namespace gaussflow::flow
