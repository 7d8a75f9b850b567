// Command-line front end: parameter tables, flow runs, large-dimension
// bridge sweeps, stability breakdowns, and the full verification gate.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gaussflow/acceptance.hpp"
#include "gaussflow/atlas.hpp"
#include "gaussflow/bridge.hpp"
#include "gaussflow/flow.hpp"
#include "gaussflow/functionals.hpp"
#include "gaussflow/measure.hpp"
#include "gaussflow/stability.hpp"

namespace {

using namespace gaussflow;

struct CommonOpts {
  int grid_n = 1024;
  double grid_l = 10.0;
  std::string measure = "gaussian";
  std::string potential_file;
  double lambda_star = 0.0;  // 0: preset default
  unsigned long long seed = 0;
  int workers = 0;
  std::string out;
};

std::string resolve_out(const std::string& out) {
  if (out.empty() || out.front() == '/') return out;
  const char* dir = std::getenv("GAUSSFLOW_OUT_DIR");
  if (!dir || !*dir) return out;
  return std::string(dir) + "/" + out;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) {
    if (path.empty()) {
      file_ = stdout;
      owned_ = false;
    } else {
      file_ = std::fopen(path.c_str(), "w");
      if (!file_) throw std::runtime_error("cannot open output file " + path);
      owned_ = true;
    }
  }
  ~CsvWriter() {
    if (owned_ && file_) std::fclose(file_);
  }
  void comment(const std::string& line) { std::fprintf(file_, "# %s\n", line.c_str()); }
  void header(const std::string& cols) { std::fprintf(file_, "%s\n", cols.c_str()); }
  void row(const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i)
      std::fprintf(file_, i + 1 == vals.size() ? "%.17g\n" : "%.17g,", vals[i]);
  }

 private:
  std::FILE* file_ = nullptr;
  bool owned_ = false;
};

MeasureSpec make_measure(const CommonOpts& c) {
  if (c.measure == "gaussian") return build_gaussian(c.grid_l, c.grid_n);
  Grid1D grid(c.grid_l, c.grid_n);
  if (c.measure == "perturbed-cosine") {
    std::vector<double> phi(static_cast<std::size_t>(c.grid_n));
    for (int i = 0; i < c.grid_n; ++i) {
      const double y = grid.node(i);
      phi[static_cast<std::size_t>(i)] = 0.5 * y * y + 0.1 * std::cos(y);
    }
    return build_custom(std::move(phi), c.lambda_star > 0.0 ? c.lambda_star : 0.9, grid);
  }
  if (c.measure == "custom-file") {
    if (c.potential_file.empty())
      throw std::runtime_error("custom-file measure needs --potential-file");
    if (!(c.lambda_star > 0.0))
      throw std::runtime_error("custom-file measure needs --lambda-star");
    std::ifstream in(c.potential_file);
    if (!in) throw std::runtime_error("cannot read " + c.potential_file);
    std::vector<double> ys, vs;
    double y, v;
    while (in >> y >> v) {
      ys.push_back(y);
      vs.push_back(v);
    }
    if (ys.size() < 2) throw std::runtime_error("potential file too short");
    std::vector<double> phi(static_cast<std::size_t>(c.grid_n));
    for (int i = 0; i < c.grid_n; ++i) {
      const double t = grid.node(i);
      // linear interpolation with flat extrapolation
      std::size_t k = 0;
      while (k + 2 < ys.size() && ys[k + 1] < t) ++k;
      const double t0 = ys[k], t1 = ys[k + 1];
      const double frac = std::min(1.0, std::max(0.0, (t - t0) / (t1 - t0)));
      phi[static_cast<std::size_t>(i)] = vs[k] + frac * (vs[k + 1] - vs[k]);
    }
    return build_custom(std::move(phi), c.lambda_star, grid);
  }
  throw std::runtime_error("unknown measure preset: " + c.measure);
}

std::string measure_echo(const CommonOpts& c) {
  std::string s = "measure=" + c.measure;
  if (!c.potential_file.empty()) s += " potential-file=" + c.potential_file;
  if (c.lambda_star > 0.0) s += " lambda-star=" + std::to_string(c.lambda_star);
  return s;
}

void run_atlas(std::optional<double> d, int resolution, const CommonOpts& c) {
  const auto rows = atlas::region_sample(d, resolution);
  CsvWriter csv(resolve_out(c.out));
  csv.comment("gaussflow atlas: admissible diffusion-exponent region");
  csv.comment(d ? "config: d=" + std::to_string(*d) +
                      " resolution=" + std::to_string(resolution)
                : "config: gauss resolution=" + std::to_string(resolution));
  csv.header("p,m_minus,m_plus,beta_minus,beta_plus");
  for (const auto& r : rows)
    csv.row({r.p, r.m_minus, r.m_plus, r.beta_minus, r.beta_plus});
}

void run_flow_cmd(double p, std::optional<double> m, std::optional<double> beta,
                  double t_final, const CommonOpts& c) {
  if (!m && !beta) throw std::runtime_error("flow needs --m or --beta");
  const double m_used = m ? *m : atlas::m_from_beta(p, *beta);
  const MeasureSpec mu = make_measure(c);
  const GridFunction w0 = GridFunction::sample(mu.grid, [](double y) {
    return 1.0 + 0.1 * std::exp(-y * y) * std::cos(2.0 * y);
  });
  const auto traj = flow::run_flow(w0, p, m_used, mu, t_final);
  CsvWriter csv(resolve_out(c.out));
  csv.comment("gaussflow flow: entropy machinery along the nonlinear diffusion");
  csv.comment("config: p=" + std::to_string(p) + " m=" + std::to_string(m_used) +
              " grid-n=" + std::to_string(c.grid_n) + " grid-l=" +
              std::to_string(c.grid_l) + " t-final=" + std::to_string(t_final) +
              " " + measure_echo(c));
  csv.comment("datum: 1 + 0.1 exp(-y^2) cos(2y)");
  csv.header("t,mass,entropy,fisher,deficit,q_beta");
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    csv.row({traj.times[i], traj.mass[i], traj.entropy[i], traj.fisher[i],
             traj.deficit[i], traj.q_beta[i]});
}

void run_bridge(double p, int n, std::vector<double> ds, const CommonOpts& c) {
  if (ds.empty()) ds = {1e2, 1e3, 1e4, 1e5};
  const MeasureSpec gamma = build_gaussian(c.grid_l, c.grid_n);
  const GridFunction v = GridFunction::sample(gamma.grid, [](double y) {
    return std::abs(y) < 1.0 ? std::exp(-1.0 / (1.0 - y * y)) : 0.0;
  });
  CsvWriter csv(resolve_out(c.out));
  csv.comment("gaussflow bridge: finite-dimension sphere functionals vs gaussian deficit");
  csv.comment("config: p=" + std::to_string(p) + " n=" + std::to_string(n) +
              " grid-n=" + std::to_string(c.grid_n) + " grid-l=" + std::to_string(c.grid_l));
  csv.comment("test function: exp(-1/(1-y^2)) on |y|<1");
  csv.header("d,gradient_term,l2_term,lp_term,combined,gaussian_target,abs_error");
  for (double d : ds) {
    const auto ev = bridge::sphere_functionals(v, n, d, p);
    csv.row({d, ev.gradient_term, ev.l2_term, ev.lp_term, ev.combined,
             ev.gaussian_target, std::abs(ev.combined - ev.gaussian_target)});
  }
}

void run_stability(double p, double eps_max, double eta_max, int table_points,
                   const std::string& json_out, const CommonOpts& c) {
  const MeasureSpec gamma = build_gaussian(c.grid_l, c.grid_n);
  const int total = table_points * table_points;
  std::vector<stability::StabilityBreakdown> cells(static_cast<std::size_t>(total));

  int workers = c.workers > 0
                    ? c.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, total));
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
        const double eps = eps_max * (i / table_points) / (table_points - 1);
        const double eta = eta_max * (i % table_points) / (table_points - 1);
        const GridFunction f = GridFunction::sample(
            gamma.grid,
            [eps, eta](double y) { return 1.0 + eps * y + eta * (y * y - 1.0); });
        cells[static_cast<std::size_t>(i)] = stability::stability_check(f, 1, p, gamma);
      }
    });
  for (auto& th : pool) th.join();

  CsvWriter csv(resolve_out(c.out));
  csv.comment("gaussflow stability: deficit vs the two sharp directions");
  csv.comment("config: p=" + std::to_string(p) + " eps-max=" + std::to_string(eps_max) +
              " eta-max=" + std::to_string(eta_max) + " grid=" +
              std::to_string(table_points) + "x" + std::to_string(table_points) +
              " grid-n=" + std::to_string(c.grid_n) + " seed=" + std::to_string(c.seed));
  csv.comment("family: 1 + eps y + eta (y^2 - 1)");
  csv.header("eps,eta,lhs,rhs,slack");
  for (int i = 0; i < total; ++i) {
    const double eps = eps_max * (i / table_points) / (table_points - 1);
    const double eta = eta_max * (i % table_points) / (table_points - 1);
    const auto& sb = cells[static_cast<std::size_t>(i)];
    csv.row({eps, eta, sb.deficit, sb.rhs, sb.slack});
  }

  if (!json_out.empty()) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (int i = 0; i < total; ++i)
      arr.push_back(nlohmann::ordered_json::parse(
          cells[static_cast<std::size_t>(i)].to_json()));
    std::ofstream jf(resolve_out(json_out));
    if (!jf) throw std::runtime_error("cannot open " + json_out);
    jf << arr.dump(2) << "\n";
  }
}

int run_verify(const CommonOpts& c) {
  acceptance::Options opt;
  opt.grid_n = c.grid_n;
  opt.grid_l = c.grid_l;
  opt.seed = c.seed;
  opt.workers = c.workers;
  const auto results = acceptance::run_all(opt, &std::cout);
  const bool ok = acceptance::all_pass(results);
  std::cout << (ok ? "verify: all criteria PASS" : "verify: FAILURES present")
            << std::endl;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaussflow: Gaussian interpolation inequalities, nonlinear "
               "diffusion flows, and stability constants"};
  app.require_subcommand(1);

  CommonOpts common;
  app.add_option("--grid-n", common.grid_n, "grid points")->capture_default_str();
  app.add_option("--grid-l", common.grid_l, "grid half width")->capture_default_str();
  app.add_option("--measure", common.measure,
                 "measure preset: gaussian | perturbed-cosine | custom-file")
      ->capture_default_str();
  app.add_option("--potential-file", common.potential_file,
                 "two-column (y, phi) file for custom-file measures");
  app.add_option("--lambda-star", common.lambda_star,
                 "convexity bound for custom measures");
  app.add_option("--seed", common.seed, "random seed")->capture_default_str();
  app.add_option("--workers", common.workers, "worker threads (0: all cores)")
      ->capture_default_str();
  app.add_option("--out", common.out, "output file (default: stdout)");

  // fallthrough lets the global flags (--out, --grid-n, ...) appear after
  // the subcommand name
  auto* atlas_cmd = app.add_subcommand("atlas", "admissible-region tables");
  atlas_cmd->fallthrough();
  double atlas_d = 0.0;
  bool atlas_gauss = false;
  int atlas_res = 201;
  atlas_cmd->add_option("--d", atlas_d, "sphere dimension");
  atlas_cmd->add_flag("--gauss", atlas_gauss, "gaussian (large-d) region");
  atlas_cmd->add_option("--resolution", atlas_res, "rows")->capture_default_str();

  auto* flow_cmd = app.add_subcommand("flow", "nonlinear diffusion run");
  flow_cmd->fallthrough();
  double flow_p = 1.5, flow_t = 20.0;
  std::optional<double> flow_m, flow_beta;
  flow_cmd->add_option("--p", flow_p, "exponent p")->capture_default_str();
  double flow_m_raw = 0.0, flow_beta_raw = 0.0;
  auto* mopt = flow_cmd->add_option("--m", flow_m_raw, "diffusion exponent m");
  auto* bopt = flow_cmd->add_option("--beta", flow_beta_raw, "beta parameter");
  flow_cmd->add_option("--t-final", flow_t, "integration time")->capture_default_str();

  auto* bridge_cmd = app.add_subcommand("bridge", "large-dimension sweep");
  bridge_cmd->fallthrough();
  double bridge_p = 1.5;
  int bridge_n = 1;
  std::vector<double> bridge_ds;
  bridge_cmd->add_option("--p", bridge_p, "exponent p")->capture_default_str();
  bridge_cmd->add_option("--n", bridge_n, "retained dimensions")->capture_default_str();
  bridge_cmd->add_option("--d", bridge_ds, "sphere dimensions (repeatable)");

  auto* stab_cmd = app.add_subcommand("stability", "stability sweep");
  stab_cmd->fallthrough();
  double stab_p = 1.5, stab_eps = 0.3, stab_eta = 0.3;
  int stab_pts = 21;
  std::string stab_json;
  stab_cmd->add_option("--p", stab_p, "exponent p")->capture_default_str();
  stab_cmd->add_option("--eps-max", stab_eps, "epsilon range")->capture_default_str();
  stab_cmd->add_option("--eta-max", stab_eta, "eta range")->capture_default_str();
  stab_cmd->add_option("--table-points", stab_pts, "sweep points per axis")
      ->capture_default_str();
  stab_cmd->add_option("--json", stab_json, "also write JSON breakdowns here");

  auto* verify_cmd =
      app.add_subcommand("verify", "run the full verification suite");
  verify_cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (atlas_cmd->parsed()) {
      std::optional<double> d;
      if (!atlas_gauss && atlas_cmd->count("--d") > 0) d = atlas_d;
      run_atlas(d, atlas_res, common);
    } else if (flow_cmd->parsed()) {
      if (mopt->count() > 0) flow_m = flow_m_raw;
      if (bopt->count() > 0) flow_beta = flow_beta_raw;
      run_flow_cmd(flow_p, flow_m, flow_beta, flow_t, common);
    } else if (bridge_cmd->parsed()) {
      run_bridge(bridge_p, bridge_n, bridge_ds, common);
    } else if (stab_cmd->parsed()) {
      run_stability(stab_p, stab_eps, stab_eta, stab_pts, stab_json, common);
    } else if (verify_cmd->parsed()) {
      return run_verify(common);
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
