// Command-line front door: problem loading, subcommand dispatch, and
// deterministic CSV/JSON artifacts.  Outputs are byte-identical for
// identical (configuration, seed) on the same platform.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pstop/analytic.hpp"
#include "pstop/classify.hpp"
#include "pstop/estimators.hpp"
#include "pstop/expr.hpp"
#include "pstop/grid.hpp"
#include "pstop/problem.hpp"
#include "pstop/scale.hpp"
#include "pstop/shape.hpp"
#include "pstop/solver.hpp"
#include "pstop/validate.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using nlohmann::json;
using namespace pstop;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitAssertion = 3;

struct run_config {
  std::string subcommand;
  std::string problem_path;
  std::string out_dir;
  std::string format = "csv";

  std::size_t grid_nodes = 2001;
  std::string grid_kind;  // "log" | "uniform"; empty = per-subcommand default
  double lo = std::numeric_limits<double>::quiet_NaN();
  double hi = std::numeric_limits<double>::quiet_NaN();
  double scale = 1.0;

  double tol = 1e-8;
  long max_iter = 1000000;

  std::size_t paths = 100000;
  double dt = 0.01;
  double horizon = 0.0;  // <= 0: 40/beta
  std::uint64_t seed = 42;
  std::vector<double> x0;

  std::string example = "dw";
  double strike = 1.0;
  double sigma = 0.2;
  double mu = 0.05;
  double beta = 0.1;
  double lambda = 1.0;
  double phi = 1.15;
  double barrier = 1.0;

  std::string suite = "shape";
  int threads = 1;
};

int apply_thread_cap() {
#ifdef _OPENMP
  if (const char* s = std::getenv("POISSON_STOP_THREADS")) {
    int n = std::atoi(s);
    if (n > 0 && n < omp_get_max_threads()) omp_set_num_threads(n);
  }
  return omp_get_max_threads();
#else
  return 1;
#endif
}

bool has(double v) { return !std::isnan(v); }

// Resolved-configuration echo; every run prints this as its first stdout line.
json config_json(const run_config& c) {
  json j;
  j["subcommand"] = c.subcommand;
  if (!c.problem_path.empty()) j["problem"] = c.problem_path;
  if (c.subcommand == "oracle") {
    j["example"] = c.example;
    j["params"] = {{"K", c.strike},   {"sigma", c.sigma},   {"mu", c.mu},
                   {"beta", c.beta},  {"lambda", c.lambda}, {"phi", c.phi},
                   {"barrier", c.barrier}};
  }
  if (c.subcommand == "check") j["suite"] = c.suite;
  j["grid"] = {{"nodes", c.grid_nodes},
               {"spacing", c.grid_kind.empty() ? "auto" : c.grid_kind}};
  if (has(c.lo)) j["grid"]["lo"] = c.lo;
  if (has(c.hi)) j["grid"]["hi"] = c.hi;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["mc"] = {{"paths", c.paths}, {"dt", c.dt}, {"horizon", c.horizon}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["format"] = c.format;
  if (!c.out_dir.empty()) j["out"] = c.out_dir;
  return j;
}

grid make_solve_grid(const problem_spec& p, const run_config& c) {
  grid_spacing spacing =
      c.grid_kind == "uniform" ? grid_spacing::uniform : grid_spacing::logarithmic;
  if (has(c.lo) != has(c.hi))
    throw CLI::ValidationError("--lo and --hi must be given together");
  if (!has(c.lo)) return default_grid(p, c.scale, c.grid_nodes, spacing);
  if (spacing == grid_spacing::uniform) return grid::uniform(c.lo, c.hi, c.grid_nodes);
  if (c.lo == 0.0 && p.dyn.domain.left == 0.0 && p.dyn.domain.left_closed())
    return grid::logarithmic_with_zero(c.hi / 2500.0, c.hi, c.grid_nodes);
  if (!(c.lo > 0.0)) throw CLI::ValidationError("log grid needs --lo > 0");
  return grid::logarithmic(c.lo, c.hi, c.grid_nodes);
}

std::string csv_table(const std::string& header,
                      const std::vector<std::vector<double>>& columns) {
  std::string out = header;
  out += '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (k) out += ',';
      out += format_double(columns[k][i]);
    }
    out += '\n';
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path.string());
  f << text;
}

// Echo the config line, then send the artifact to stdout or --out.  Verdict
// subcommands pass an empty header and emit JSON regardless of --format.
void emit(const run_config& c, const json& payload, const std::string& header,
          const std::vector<std::vector<double>>& columns) {
  std::cout << payload.at("config").dump() << "\n";
  const bool tabular = !header.empty() && c.format == "csv";
  std::string text =
      tabular ? csv_table(header, columns) : payload.dump(2) + "\n";
  if (c.out_dir.empty()) {
    std::cout << text;
    return;
  }
  std::filesystem::path dir(c.out_dir);
  if (!std::filesystem::is_directory(dir))
    throw std::runtime_error("missing output directory: " + c.out_dir);
  write_file(dir / (c.subcommand + (tabular ? ".csv" : ".json")), text);
  write_file(dir / "config.json", payload.at("config").dump(2) + "\n");
}

json check_json(const assumption_check& a) {
  return {{"status", to_string(a.status)}, {"detail", a.detail}};
}

json endpoint_json(const endpoint_report& e) {
  json j;
  j["kind"] = to_string(e.kind);
  j["accessible"] = e.accessible;
  j["criterion"] = std::string(1, e.which);
  j["detail"] = e.detail;
  return j;
}

int run_solve(run_config& c) {
  problem_spec p = load_problem(c.problem_path);
  grid g = make_solve_grid(p, c);

  solve_options opt;
  opt.tol = c.tol;
  opt.max_iter = c.max_iter;
  solve_result res;
  try {
    res = value_iteration(p, g, opt);
  } catch (const std::runtime_error& e) {
    std::cout << config_json(c).dump() << "\n";
    std::cerr << "validation failure: " << e.what() << "\n";
    return kExitValidation;
  }
  if (!res.report.warning.empty())
    std::cerr << "warning: " << res.report.warning << "\n";
  std::cerr << "iterations=" << res.report.iterations
            << " converged=" << (res.report.converged ? 1 : 0)
            << " wall_seconds=" << res.report.wall_seconds << "\n";

  value_function H = conditional_value(p, res.value);
  std::vector<double> xs(g.nodes), V(res.value.v), gv(g.size()), ps(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    gv[i] = p.payoff(xs[i]);
    ps[i] = psi(p, xs[i]);
  }

  json payload;
  payload["config"] = config_json(c);
  payload["report"] = {{"iterations", res.report.iterations},
                       {"converged", res.report.converged},
                       {"final_residual", res.report.final_residual},
                       {"warning", res.report.warning},
                       {"assumptions", res.report.assumptions.summary()}};
  payload["data"] = {
      {"x", xs}, {"V", V}, {"g", gv}, {"psi", ps}, {"H", H.v}};
  emit(c, payload, "x,V,g,psi,H", {xs, V, gv, ps, H.v});
  return kExitOk;
}

int run_oracle(run_config& c) {
  struct family_default {
    double lo, hi;
    grid_spacing spacing;
  };
  family_default fd{c.strike / 50.0, 50.0 * c.strike, grid_spacing::logarithmic};
  if (c.example == "linear") fd = {0.0, 10.0, grid_spacing::uniform};
  if (c.example == "sinh") fd = {0.0, 10.0, grid_spacing::uniform};
  if (c.example == "barrier")
    fd = {c.barrier / 50.0, 50.0 * c.barrier, grid_spacing::logarithmic};
  if (c.example == "local-time") fd = {-3.0, 3.0, grid_spacing::uniform};
  if (c.example == "nonequality") fd = {0.01, 5.0, grid_spacing::uniform};
  if (has(c.lo)) fd.lo = c.lo;
  if (has(c.hi)) fd.hi = c.hi;
  if (!c.grid_kind.empty())
    fd.spacing = c.grid_kind == "log" ? grid_spacing::logarithmic
                                      : grid_spacing::uniform;
  grid g = fd.spacing == grid_spacing::logarithmic
               ? grid::logarithmic(fd.lo, fd.hi, c.grid_nodes)
               : grid::uniform(fd.lo, fd.hi, c.grid_nodes);

  std::vector<double> xs(g.nodes), value(g.size()), payoff(g.size()), ps(g.size());
  json params;
  if (c.example == "dw") {
    auto sol = analytic::make_dw(c.strike, c.sigma, c.mu, c.beta, c.lambda);
    params = {{"alpha_plus", sol.alpha_plus}, {"alpha_minus", sol.alpha_minus},
              {"rho", sol.rho},               {"kappa", sol.kappa},
              {"boundary", sol.boundary},     {"p", sol.p},
              {"c", sol.c}};
    for (std::size_t i = 0; i < g.size(); ++i) {
      value[i] = sol.value(xs[i]);
      payoff[i] = std::max(xs[i] - c.strike, 0.0);
      ps[i] = psi_value(payoff[i], c.lambda, c.beta);
    }
  } else if (c.example == "linear") {
    params = {{"rho", c.lambda / (c.lambda + c.beta - c.mu)}};
    for (std::size_t i = 0; i < g.size(); ++i) {
      value[i] = analytic::linear_payoff_value(xs[i], c.mu, c.beta, c.lambda);
      payoff[i] = xs[i];
      ps[i] = psi_value(payoff[i], c.lambda, c.beta);
    }
  } else if (c.example == "sinh") {
    auto sol = analytic::make_sinh(c.beta);
    params = {{"xi", sol.xi}, {"boundary", sol.boundary}, {"peak", sol.peak}};
    for (std::size_t i = 0; i < g.size(); ++i) {
      value[i] = sol.value(xs[i]);
      payoff[i] = xs[i];
      ps[i] = payoff[i];  // unconstrained stopping: theta = inf
    }
  } else if (c.example == "barrier") {
    for (std::size_t i = 0; i < g.size(); ++i) {
      value[i] = analytic::barrier_rate_value(xs[i], c.barrier, c.sigma, c.mu, c.beta);
      payoff[i] = xs[i];
      ps[i] = xs[i] <= c.barrier ? payoff[i] : 0.0;
    }
  } else if (c.example == "local-time") {
    params = {{"threshold", analytic::local_time_value(0.0, c.phi, c.lambda).threshold}};
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto r = analytic::local_time_value(xs[i], c.phi, c.lambda);
      value[i] = r.value;
      payoff[i] = r.payoff;
      ps[i] = psi_value(payoff[i], c.lambda, c.beta);
    }
  } else if (c.example == "nonequality") {
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto r = analytic::nonequality_values(xs[i], c.beta);
      value[i] = r.poisson;
      payoff[i] = xs[i] <= 0.0 ? 1.0 : 0.0;
      ps[i] = 0.0;
    }
  } else {
    throw CLI::ValidationError("unknown --example " + c.example);
  }

  json payload;
  payload["config"] = config_json(c);
  payload["params"] = params;
  payload["data"] = {{"x", xs}, {"value", value}, {"payoff", payoff}, {"psi", ps}};
  emit(c, payload, "x,value,payoff,psi", {xs, value, payoff, ps});
  return kExitOk;
}

json estimate_json(const mc::estimate& e) {
  return {{"value", e.value},
          {"std_error", e.std_error},
          {"n_paths", e.n_paths},
          {"unfinished_fraction", e.unfinished_fraction},
          {"bias_bound", e.bias_bound},
          {"seed", e.seed}};
}

int run_simulate(run_config& c) {
  problem_spec p = load_problem(c.problem_path);
  grid g = default_grid(p, c.scale, 129, grid_spacing::logarithmic);
  auto [lo, hi] = probe_range(p, g);
  assumption_report rep = validate_problem(p, lo, hi);
  if (rep.definite_fail()) {
    std::cout << config_json(c).dump() << "\n";
    std::cerr << "validation failure: " << rep.summary() << "\n";
    return kExitValidation;
  }
  if (!rep.pass())
    std::cerr << "warning: assumptions not fully verified: " << rep.summary() << "\n";

  mc::mc_options opt;
  opt.n_paths = c.paths;
  opt.dt = c.dt;
  opt.horizon = c.horizon;
  opt.seed = c.seed;
  if (c.x0.empty()) c.x0.push_back(1.0);

  json results = json::array();
  std::vector<double> xc, est_d, se_d, est_t, se_t;
  for (double x : c.x0) {
    mc::g_estimates e = mc::estimate_G(p, x, opt);
    const mc::estimate* worst =
        e.direct.unfinished_fraction > e.time_changed.unfinished_fraction
            ? &e.direct
            : &e.time_changed;
    if (worst->unfinished_fraction > opt.unfinished_threshold)
      std::cerr << "warning: unfinished path mass " << worst->unfinished_fraction
                << " at x0=" << format_double(x) << "\n";
    results.push_back({{"x0", x},
                       {"direct", estimate_json(e.direct)},
                       {"time_changed", estimate_json(e.time_changed)},
                       {"discrepancy_sigmas", e.discrepancy_sigmas()}});
    xc.push_back(x);
    est_d.push_back(e.direct.value);
    se_d.push_back(e.direct.std_error);
    est_t.push_back(e.time_changed.value);
    se_t.push_back(e.time_changed.std_error);
  }

  json payload;
  payload["config"] = config_json(c);
  payload["estimates"] = results;
  emit(c, payload, "x,direct,direct_se,time_changed,time_changed_se",
       {xc, est_d, se_d, est_t, se_t});
  return kExitOk;
}

int run_transform(run_config& c) {
  problem_spec p = load_problem(c.problem_path);
  grid g = make_solve_grid(p, c);
  auto [lo, hi] = probe_range(p, g);
  scale_map sm(p.dyn, lo, hi);
  diffusion_spec ydyn = time_change_coefficients(p, true);

  std::vector<double> xs, s, sp, by, ay;
  for (double x : g.nodes) {
    if (x < lo || x > hi) continue;  // skip absorbing edge nodes
    xs.push_back(x);
    s.push_back(sm.s(x));
    sp.push_back(sm.sprime(x));
    by.push_back(ydyn.drift(x));
    ay.push_back(ydyn.vol(x));
  }

  json payload;
  payload["config"] = config_json(c);
  payload["scale"] = {{"anchor", sm.anchor()},
                      {"zero_drift", sm.zero_drift()},
                      {"left_limit", to_string(sm.left_limit().status)},
                      {"right_limit", to_string(sm.right_limit().status)}};
  payload["data"] = {{"x", xs}, {"s", s}, {"sprime", sp},
                     {"drift_y", by}, {"vol_y", ay}};
  emit(c, payload, "x,s,sprime,drift_y,vol_y", {xs, s, sp, by, ay});
  return kExitOk;
}

int run_classify(run_config& c) {
  problem_spec p = load_problem(c.problem_path);
  grid g = make_solve_grid(p, c);
  auto [lo, hi] = probe_range(p, g);
  scale_map sm(p.dyn, lo, hi);
  classification cls = classify_endpoints(p.dyn, sm);
  shape::hypothesis_report hyp = shape::detect_hypotheses(p, lo, hi);

  json payload;
  payload["config"] = config_json(c);
  payload["endpoints"] = {{"left", endpoint_json(cls.left)},
                          {"right", endpoint_json(cls.right)}};
  payload["hypotheses"] = {
      {"theta_increasing", hyp.theta_increasing},
      {"theta_borderline", hyp.theta_borderline},
      {"psi_increasing", hyp.psi_increasing},
      {"psi_increasing_borderline", hyp.psi_increasing_borderline},
      {"psi_convex", hyp.psi_convex},
      {"psi_convex_borderline", hyp.psi_convex_borderline},
      {"psi_concave", hyp.psi_concave},
      {"psi_concave_borderline", hyp.psi_concave_borderline},
      {"natural_scale", hyp.natural_scale},
      {"kotani", to_string(hyp.kotani)}};
  emit(c, payload, "", {});
  return kExitOk;
}

int run_check(run_config& c) {
  if (c.suite != "shape")
    throw CLI::ValidationError("unknown --suite " + c.suite);
  shape::shape_suite suite = shape::build_shape_suite(c.seed);
  std::vector<problem_spec> all;
  for (auto* v : {&suite.monotone, &suite.convex, &suite.concave,
                  &suite.counterexamples})
    for (auto& p : *v) all.push_back(p);
  shape::suite_report rep = shape::verify_shape_theorems(all, c.grid_nodes, 1e-6);

  json entries = json::array();
  for (const auto& e : rep.entries) {
    entries.push_back({{"name", e.name},
                       {"monotone_applicable", e.monotone_applicable},
                       {"monotone_ok", e.monotone_ok},
                       {"convex_applicable", e.convex_applicable},
                       {"convex_ok", e.convex_ok},
                       {"domination_ok", e.domination_ok},
                       {"concave_applicable", e.concave_applicable},
                       {"concave_ok", e.concave_ok},
                       {"fixed_after_first_ok", e.fixed_after_first_ok},
                       {"hard_fail", e.hard_fail},
                       {"detail", e.detail}});
  }
  json payload;
  payload["config"] = config_json(c);
  payload["all_ok"] = rep.all_ok;
  payload["summary"] = rep.summary();
  payload["entries"] = entries;
  emit(c, payload, "", {});
  return rep.all_ok ? kExitOk : kExitAssertion;
}

int run_validate(run_config& c) {
  problem_spec p = load_problem(c.problem_path);
  grid g = make_solve_grid(p, c);
  auto [lo, hi] = probe_range(p, g);
  assumption_report rep = validate_problem(p, lo, hi);

  json payload;
  payload["config"] = config_json(c);
  payload["sa1"] = check_json(rep.sa1);
  payload["sa2"] = check_json(rep.sa2);
  payload["sa3"] = check_json(rep.sa3);
  payload["endpoints"] = {{"left", endpoint_json(rep.endpoints.left)},
                          {"right", endpoint_json(rep.endpoints.right)}};
  payload["pass"] = rep.pass();
  payload["summary"] = rep.summary();
  emit(c, payload, "", {});
  if (rep.pass()) return kExitOk;
  std::cerr << "validation failure: " << rep.summary() << "\n";
  return kExitValidation;
}

void add_io_flags(CLI::App* c, run_config& cfg) {
  c->add_option("--out", cfg.out_dir, "output directory (default: stdout)");
  c->add_option("--format", cfg.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  c->add_option("--seed", cfg.seed, "RNG seed (default 42)");
}

void add_grid_flags(CLI::App* c, run_config& cfg) {
  c->add_option("--grid-nodes", cfg.grid_nodes, "grid node count (default 2001)")
      ->check(CLI::PositiveNumber);
  c->add_option("--grid", cfg.grid_kind, "log|uniform")
      ->check(CLI::IsMember({"log", "uniform"}));
  c->add_option("--lo", cfg.lo, "grid lower end (default: problem-driven)");
  c->add_option("--hi", cfg.hi, "grid upper end (default: problem-driven)");
  c->add_option("--scale", cfg.scale, "query scale for automatic grids");
}

void add_mc_flags(CLI::App* c, run_config& cfg) {
  c->add_option("--paths", cfg.paths, "MC path count (default 100000)");
  c->add_option("--dt", cfg.dt, "Euler step (default 0.01)");
  c->add_option("--horizon", cfg.horizon, "time horizon (default 40/beta)");
}

}  // namespace

int main(int argc, char** argv) {
  run_config cfg;
  CLI::App app{"Poisson optimal stopping of one-dimensional diffusions"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "value iteration on a problem file");
  solve->add_option("--problem", cfg.problem_path, "problem JSON file")->required();
  add_grid_flags(solve, cfg);
  solve->add_option("--tol", cfg.tol, "sup-norm increment threshold (default 1e-8)");
  solve->add_option("--max-iter", cfg.max_iter, "iteration cap (default 1000000)");
  add_io_flags(solve, cfg);

  auto* oracle = app.add_subcommand("oracle", "closed-form reference values");
  oracle->add_option("--example", cfg.example,
                     "dw|linear|sinh|barrier|local-time|nonequality");
  oracle->add_option("--K", cfg.strike, "strike (dw)");
  oracle->add_option("--sigma", cfg.sigma, "volatility coefficient");
  oracle->add_option("--mu", cfg.mu, "drift coefficient");
  oracle->add_option("--beta", cfg.beta, "discount rate");
  oracle->add_option("--lambda", cfg.lambda, "event rate");
  oracle->add_option("--phi", cfg.phi, "kink weight (local-time)");
  oracle->add_option("--barrier", cfg.barrier, "barrier level (barrier)");
  add_grid_flags(oracle, cfg);
  add_io_flags(oracle, cfg);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo G estimators");
  simulate->add_option("--problem", cfg.problem_path, "problem JSON file")->required();
  simulate->add_option("--x0", cfg.x0, "start points (default 1.0)");
  add_mc_flags(simulate, cfg);
  add_io_flags(simulate, cfg);

  auto* transform = app.add_subcommand("transform", "scale map and time change");
  transform->add_option("--problem", cfg.problem_path, "problem JSON file")->required();
  add_grid_flags(transform, cfg);
  add_io_flags(transform, cfg);

  auto* classify = app.add_subcommand("classify", "endpoints and hypotheses (JSON)");
  classify->add_option("--problem", cfg.problem_path, "problem JSON file")->required();
  add_grid_flags(classify, cfg);
  add_io_flags(classify, cfg);

  auto* check = app.add_subcommand("check", "property suite (JSON report)");
  check->add_option("--suite", cfg.suite, "shape");
  check->add_option("--grid-nodes", cfg.grid_nodes, "grid node count");
  add_io_flags(check, cfg);

  auto* validate = app.add_subcommand("validate", "standing assumptions (JSON)");
  validate->add_option("--problem", cfg.problem_path, "problem JSON file")->required();
  add_grid_flags(validate, cfg);
  add_io_flags(validate, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  cfg.threads = apply_thread_cap();
  try {
    if (solve->parsed()) return (cfg.subcommand = "solve", run_solve(cfg));
    if (oracle->parsed()) return (cfg.subcommand = "oracle", run_oracle(cfg));
    if (simulate->parsed()) return (cfg.subcommand = "simulate", run_simulate(cfg));
    if (transform->parsed()) return (cfg.subcommand = "transform", run_transform(cfg));
    if (classify->parsed()) return (cfg.subcommand = "classify", run_classify(cfg));
    if (check->parsed()) return (cfg.subcommand = "check", run_check(cfg));
    if (validate->parsed()) return (cfg.subcommand = "validate", run_validate(cfg));
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
