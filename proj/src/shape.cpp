#include "pstop/shape.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>

#include "pstop/expr.hpp"
#include "pstop/grid.hpp"
#include "pstop/scale.hpp"
#include "pstop/summation.hpp"
#include "pstop/validate.hpp"

namespace pstop::shape {

std::string to_string(property p) {
  switch (p) {
    case property::monotone_increasing: return "monotone-increasing";
    case property::convex: return "convex";
    case property::concave: return "concave";
  }
  return "?";
}

std::string to_string(growth_verdict v) {
  switch (v) {
    case growth_verdict::holds: return "holds";
    case growth_verdict::fails: return "fails";
    case growth_verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

double value_scale(const std::vector<double>& vals) {
  double s = 0.0;
  for (double v : vals) s = std::max(s, std::abs(v));
  return s;
}

shape_report monotone_on(const std::vector<double>& xs,
                         const std::vector<double>& vals, double rel_tol) {
  shape_report r;
  r.prop = property::monotone_increasing;
  r.tol = rel_tol;
  r.scale = value_scale(vals);
  double allow = (rel_tol + 8.0 * DBL_EPSILON) * r.scale;
  double worst = 0.0;
  std::size_t at = 0;
  for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
    double drop = vals[i] - vals[i + 1];
    if (drop > worst) {
      worst = drop;
      at = i;
    }
  }
  if (worst > allow) {
    r.holds = false;
    r.magnitude = worst;
    r.index = at;
    r.x_lo = xs[at];
    r.x_hi = xs[at + 1];
    std::ostringstream os;
    os << "decreases by " << format_double(worst) << " from x="
       << format_double(r.x_lo) << " to x=" << format_double(r.x_hi);
    r.detail = os.str();
  }
  return r;
}

// sign = +1 tests convexity, -1 concavity, via the nonuniform-grid second
// difference.  The user tolerance is in curvature units relative to the
// value scale; the machine-noise floor is amplified by the stencil gain
// kappa_i, so affine inputs pass at rel_tol = 0.
shape_report curvature_on(const std::vector<double>& xs,
                          const std::vector<double>& vals, double rel_tol,
                          double sign) {
  shape_report r;
  r.prop = sign > 0 ? property::convex : property::concave;
  r.tol = rel_tol;
  r.scale = value_scale(vals);
  double worst = 0.0, worst_allow = 0.0;
  std::size_t at = 0;
  for (std::size_t i = 1; i + 1 < vals.size(); ++i) {
    double hm = xs[i] - xs[i - 1];
    double hp = xs[i + 1] - xs[i];
    double d2 = 2.0 *
                ((vals[i + 1] - vals[i]) / hp - (vals[i] - vals[i - 1]) / hm) /
                (hm + hp);
    double kappa = 2.0 * (1.0 / hm + 1.0 / hp) / (hm + hp);
    double allow = rel_tol * r.scale + 8.0 * DBL_EPSILON * r.scale * kappa;
    double viol = -sign * d2 - allow;
    if (viol > worst) {
      worst = viol;
      worst_allow = allow;
      at = i;
    }
  }
  if (worst > 0.0) {
    r.holds = false;
    r.magnitude = worst + worst_allow;  // the raw |D2| on the wrong side
    r.index = at;
    r.x_lo = xs[at - 1];
    r.x_mid = xs[at];
    r.x_hi = xs[at + 1];
    std::ostringstream os;
    os << "second difference " << format_double(sign > 0 ? -r.magnitude
                                                         : r.magnitude)
       << " at x=" << format_double(r.x_mid);
    r.detail = os.str();
  }
  return r;
}

}  // namespace

shape_report check_monotone(const value_function& v, double rel_tol) {
  return monotone_on(v.g.nodes, v.v, rel_tol);
}

shape_report check_convex(const value_function& v, double rel_tol) {
  return curvature_on(v.g.nodes, v.v, rel_tol, +1.0);
}

shape_report check_concave(const value_function& v, double rel_tol) {
  return curvature_on(v.g.nodes, v.v, rel_tol, -1.0);
}

namespace {

constexpr std::size_t kProbeNodes = 2049;
constexpr double kTightTol = 1e-12;
constexpr double kLooseTol = 1e-6;

// clear pass / clear fail / in-between ("borderline")
void classify_hypothesis(const shape_report& tight, const shape_report& loose,
                         bool* value, bool* borderline) {
  *value = loose.holds;
  *borderline = loose.holds != tight.holds;
}

}  // namespace

hypothesis_report detect_hypotheses(const problem_spec& p, double probe_lo,
                                    double probe_hi) {
  std::vector<double> xs(kProbeNodes);
  for (std::size_t i = 0; i < kProbeNodes; ++i)
    xs[i] = probe_lo + (probe_hi - probe_lo) * double(i) / double(kProbeNodes - 1);

  std::vector<double> theta_squashed(kProbeNodes), psi_vals(kProbeNodes);
  for (std::size_t i = 0; i < kProbeNodes; ++i) {
    double t = validation_rate(p, xs[i]);
    // t / (1 + t) preserves order, maps [0, inf] into [0, 1], and keeps the
    // comparison finite at declared-infinite rates
    theta_squashed[i] = std::isinf(t) ? 1.0 : t / (1.0 + t);
    psi_vals[i] = psi(p, xs[i]);
  }

  hypothesis_report h;
  classify_hypothesis(monotone_on(xs, theta_squashed, kTightTol),
                      monotone_on(xs, theta_squashed, kLooseTol),
                      &h.theta_increasing, &h.theta_borderline);
  classify_hypothesis(monotone_on(xs, psi_vals, kTightTol),
                      monotone_on(xs, psi_vals, kLooseTol), &h.psi_increasing,
                      &h.psi_increasing_borderline);
  classify_hypothesis(curvature_on(xs, psi_vals, kTightTol, +1.0),
                      curvature_on(xs, psi_vals, kLooseTol, +1.0),
                      &h.psi_convex, &h.psi_convex_borderline);
  classify_hypothesis(curvature_on(xs, psi_vals, kTightTol, -1.0),
                      curvature_on(xs, psi_vals, kLooseTol, -1.0),
                      &h.psi_concave, &h.psi_concave_borderline);

  h.natural_scale = provably_zero(p.dyn.drift);
  if (h.natural_scale) {
    try {
      h.kotani = kotani_check(p, probe_lo, probe_hi).combined();
    } catch (const std::exception&) {
      h.kotani = condition_status::inconclusive;
    }
  }
  return h;
}

std::string suite_report::summary() const {
  std::ostringstream os;
  std::size_t applicable = 0, failed = 0;
  for (const auto& e : entries) {
    bool any = e.monotone_applicable || e.convex_applicable || e.concave_applicable;
    applicable += any ? 1 : 0;
    failed += e.hard_fail ? 1 : 0;
  }
  os << entries.size() << " problems, " << applicable
     << " with theorem hypotheses satisfied, " << failed << " failures";
  return os.str();
}

suite_report verify_shape_theorems(const std::vector<problem_spec>& problems,
                                   std::size_t grid_nodes, double shape_tol) {
  suite_report rep;
  for (const auto& p : problems) {
    suite_entry e;
    e.name = p.name.empty() ? "unnamed" : p.name;
    grid g = default_grid(p, 1.0, grid_nodes, grid_spacing::uniform);
    solve_options opt;
    opt.max_iter = 1000000;  // capped-barrier rates contract slowly
    auto sol = value_iteration(p, g, opt);
    e.hyp = detect_hypotheses(p, g.lo(), g.hi());

    shape_report mono = check_monotone(sol.value, shape_tol);
    shape_report conv = check_convex(sol.value, shape_tol);
    shape_report conc = check_concave(sol.value, shape_tol);

    e.monotone_applicable = e.hyp.theta_increasing && !e.hyp.theta_borderline &&
                            e.hyp.psi_increasing &&
                            !e.hyp.psi_increasing_borderline;
    if (e.monotone_applicable) e.monotone_ok = mono.holds;

    bool natural_kotani =
        e.hyp.natural_scale && e.hyp.kotani == condition_status::holds;
    e.convex_applicable =
        natural_kotani && e.hyp.psi_convex && !e.hyp.psi_convex_borderline;
    if (e.convex_applicable) {
      e.convex_ok = conv.holds;
      value_function gtheta = g_operator(p, p.payoff, g, opt);
      double allow = 2.0 * std::max(opt.tol, shape_tol * (1.0 + gtheta.sup_norm()));
      // Domination is asserted away from truncated natural ends, where the
      // extrapolation boundary row understates unbounded payoff growth;
      // absorbing endpoints are exact and stay included.
      double span = g.hi() - g.lo();
      double core_lo = g.lo() > p.dyn.domain.left ? g.lo() + 0.15 * span
                                                  : g.lo();
      double core_hi = g.hi() < p.dyn.domain.right ? g.hi() - 0.15 * span
                                                   : g.hi();
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] < core_lo || g[i] > core_hi) continue;
        if (gtheta.v[i] < psi(p, g[i]) - allow) {
          e.domination_ok = false;
          break;
        }
      }
    }

    e.concave_applicable =
        natural_kotani && e.hyp.psi_concave && !e.hyp.psi_concave_borderline;
    if (e.concave_applicable) {
      e.concave_ok = conc.holds;
      // psi concave forces G_theta <= g, so the iteration is stationary
      // after the first application
      if (sol.report.increments.size() >= 2)
        e.fixed_after_first_ok = sol.report.increments[1] <= 10.0 * opt.tol;
    }

    e.hard_fail = (e.monotone_applicable && !e.monotone_ok) ||
                  (e.convex_applicable && (!e.convex_ok || !e.domination_ok)) ||
                  (e.concave_applicable &&
                   (!e.concave_ok || !e.fixed_after_first_ok));

    std::ostringstream os;
    os << "monotone:" << (mono.holds ? "yes" : "no (" + mono.detail + ")")
       << " convex:" << (conv.holds ? "yes" : "no (" + conv.detail + ")")
       << " concave:" << (conc.holds ? "yes" : "no (" + conc.detail + ")");
    e.detail = os.str();
    rep.all_ok = rep.all_ok && !e.hard_fail;
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

namespace {

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

std::string num(double v) { return format_double(round3(v)); }

nlohmann::json interval_halfline_absorbing() {
  return {{"left", 0.0},
          {"right", "inf"},
          {"left_kind", "absorbing"},
          {"right_kind", "natural"}};
}

nlohmann::json interval_line() {
  return {{"left", "-inf"},
          {"right", "inf"},
          {"left_kind", "natural"},
          {"right_kind", "natural"}};
}

}  // namespace

shape_suite build_shape_suite(std::uint64_t seed) {
  shape_suite suite;
  rng::counter_stream cs(seed, 0, 0);
  auto take = [&](double lo, double hi) {
    return round3(lo + (hi - lo) * cs.uniform());
  };

  for (int k = 0; k < 20; ++k) {
    bool line = k >= 12;
    double beta = take(0.3, 1.5);
    double v0 = take(0.5, 1.5), v1 = take(0.0, 1.0);
    double p0 = take(0.2, 1.0), p1 = take(0.2, 1.5);
    double r0 = take(0.3, 1.0), r1 = take(0.2, 2.0);
    nlohmann::json pj;
    pj["name"] = "monotone_" + std::to_string(k);
    pj["beta"] = beta;
    pj["drift"] = 0.0;
    if (line) {
      pj["vol"] = num(v0) + "+" + num(v1) + "*abs(x)";
      pj["payoff"] = num(p0 + p1) + "+" + num(p1) + "*x/(1+abs(x))";
      pj["rate"] = num(r0) + "+" + num(r1) + "*x/(1+abs(x))/2+" + num(r1 / 2.0);
      pj["interval"] = interval_line();
    } else {
      pj["vol"] = num(v0) + "+" + num(v1) + "*x";
      pj["payoff"] = num(p0) + "+" + num(p1) + "*x";
      int family = k % 3;
      if (family == 0)
        pj["rate"] = num(r0) + "+" + num(r1) + "*x/(1+x)";
      else if (family == 1)
        pj["rate"] = num(r0) + "+" + num(r1) + "*(1-exp(-x))";
      else
        pj["rate"] = num(r0) + "+" + num(r1) + "*x";
      pj["interval"] = interval_halfline_absorbing();
    }
    suite.monotone.push_back(problem_from_json(pj));
  }

  for (int k = 0; k < 20; ++k) {
    bool line = k >= 10;
    double beta = take(0.3, 1.5);
    // vol slope kept subcritical so quadratic payoffs have finite one-step
    // values: vol_slope^2 < beta + rate along the whole suite
    double v0 = take(0.5, 1.5), v1 = take(0.0, 0.5);
    double r0 = take(0.3, 1.5);
    nlohmann::json pj;
    pj["name"] = "convex_" + std::to_string(k);
    pj["beta"] = beta;
    pj["drift"] = 0.0;
    if (line) {
      double p0 = take(0.2, 1.0), p1 = take(0.1, 0.8);
      pj["vol"] = num(v0) + "+" + num(v1) + "*abs(x)";
      if (k % 2 == 0) {
        pj["payoff"] = num(p0) + "+" + num(p1) + "*x^2";
        pj["rate"] = r0;
      } else {
        // state-dependent rate engineered so that psi is exactly the convex
        // target q: theta = beta q / (g - q) with q < g
        double q0 = round3(p0 * take(0.3, 0.7));
        double q1 = round3(p1 * take(0.3, 0.7));
        pj["payoff"] = num(p0) + "+" + num(p1) + "*x^2";
        pj["rate"] = "(" + num(beta) + "*(" + num(q0) + "+" + num(q1) +
                     "*x^2))/((" + num(p0 - q0) + ")+(" + num(p1 - q1) +
                     ")*x^2)";
      }
      pj["interval"] = interval_line();
    } else {
      double p0 = take(0.0, 0.8), p1 = take(0.2, 1.2);
      pj["vol"] = num(v0) + "+" + num(v1) + "*x";
      if (k % 2 == 0) {
        pj["payoff"] = num(p0) + "+" + num(p1) + "*x^2";
      } else {
        pj["payoff"] = {{"builtin", "call-payoff"}, {"strike", take(0.3, 1.5)}};
      }
      pj["rate"] = r0;
      pj["interval"] = interval_halfline_absorbing();
    }
    suite.convex.push_back(problem_from_json(pj));
  }

  for (int k = 0; k < 6; ++k) {
    double beta = take(0.3, 1.5);
    double v0 = take(0.5, 1.5), v1 = take(0.0, 0.8);
    double p0 = take(0.1, 0.8), p1 = take(0.2, 1.2);
    double r0 = take(0.3, 1.5);
    nlohmann::json pj;
    pj["name"] = "concave_" + std::to_string(k);
    pj["beta"] = beta;
    pj["drift"] = 0.0;
    pj["vol"] = num(v0) + "+" + num(v1) + "*x";
    int family = k % 3;
    if (family == 0)
      pj["payoff"] = num(p0) + "+" + num(p1) + "*sqrt(x+" + num(take(0.2, 1.0)) + ")";
    else if (family == 1)
      pj["payoff"] = num(p0) + "+" + num(p1) + "*log(1+x)";
    else
      pj["payoff"] = num(p0) + "+" + num(p1) + "*x/(1+x)";
    pj["rate"] = r0;
    pj["interval"] = interval_halfline_absorbing();
    suite.concave.push_back(problem_from_json(pj));
  }

  // the constant-psi fixed point: psi = 1/2 exactly, both convex and concave
  {
    nlohmann::json pj;
    pj["name"] = "psi_half";
    pj["beta"] = 0.1;
    pj["drift"] = 0.0;
    pj["vol"] = 1.0;
    pj["payoff"] = "1+x";
    pj["rate"] = "0.1/(1+2*x)";
    pj["interval"] = interval_halfline_absorbing();
    suite.concave.push_back(problem_from_json(pj));
  }

  // hypothesis-violating classics: a drifting (non-natural-scale) problem
  // whose value is neither convex nor concave, and the barrier rate whose
  // value is non-monotone despite an increasing payoff
  {
    nlohmann::json pj;
    pj["name"] = "eg2_2";
    pj["beta"] = 0.5;
    pj["drift"] = 1.0;
    pj["vol"] = 1.0;
    pj["payoff"] = "x";
    pj["rate"] = 20.0;
    pj["interval"] = interval_halfline_absorbing();
    suite.counterexamples.push_back(problem_from_json(pj));
  }
  {
    nlohmann::json pj;
    pj["name"] = "eg2_4";
    pj["beta"] = 2.0;
    pj["drift"] = 0.0;
    pj["vol"] = "sqrt(2)*x";
    pj["payoff"] = "x";
    pj["rate"] = {{"builtin", "indicator-barrier"},
                  {"threshold", 1.0},
                  {"low", "inf"},
                  {"high", 0.0}};
    pj["interval"] = {{"left", 0.0},
                      {"right", "inf"},
                      {"left_kind", "natural"},
                      {"right_kind", "natural"}};
    suite.counterexamples.push_back(problem_from_json(pj));
  }
  return suite;
}

growth_report growth_condition_check(const problem_spec& p, double x0,
                                     const std::vector<double>& t_grid,
                                     const mc::mc_options& opt,
                                     double threshold) {
  growth_report rep;
  rep.threshold = threshold;
  rep.t = t_grid;

  if (auto bound = p.payoff.provable_bound()) {
    // bounded payoff: e^(-beta t) sup g -> 0, no simulation needed
    rep.bounded_shortcut = true;
    rep.verdict = growth_verdict::holds;
    rep.detail = "payoff provably bounded by " + format_double(*bound);
    return rep;
  }
  if (t_grid.empty())
    throw std::invalid_argument("growth_condition_check: empty t grid");

  double horizon = opt.resolved_horizon(p.beta);
  auto n_steps = std::size_t(std::ceil(horizon / opt.dt - 1e-9));
  mc::step_model m = mc::make_step_model(p.dyn);

  // per-path suffix suprema of e^(-beta s) g(X_s), sampled at the t grid
  std::vector<std::size_t> t_index(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    double idx = std::floor(t_grid[k] / opt.dt);
    t_index[k] = std::min(n_steps, std::size_t(std::max(idx, 0.0)));
  }

  std::size_t n = opt.n_paths;
  std::vector<double> rows(n * t_grid.size());
  std::vector<double> ends(n);
  auto body = [&](std::size_t i) {
    rng::counter_stream steps(opt.seed, i, mc::kStepChannel);
    std::vector<double> disc(n_steps + 1);
    double x = x0;
    disc[0] = std::max(p.payoff(x), 0.0);
    bool frozen = false;
    for (std::size_t j = 1; j <= n_steps; ++j) {
      if (!frozen) {
        double xn = m.advance(x, opt.dt, steps.normal());
        if (!std::isfinite(xn))
          xn = x;  // saturate rather than abort: this is a diagnostic probe
        if (m.absorb_lo && xn <= m.lo) {
          x = m.lo;
          frozen = true;
        } else if (m.absorb_hi && xn >= m.hi) {
          x = m.hi;
          frozen = true;
        } else {
          x = std::min(std::max(xn, m.lo), m.hi);
        }
      }
      double val = std::exp(-p.beta * opt.dt * double(j)) * p.payoff(x);
      disc[j] = std::max(val, 0.0);
    }
    ends[i] = p.payoff(x);
    // backward suffix maximum, sampled at the probe indices
    std::vector<double> suffix(t_grid.size(), 0.0);
    double run = 0.0;
    std::size_t k = t_grid.size();
    for (std::size_t jj = n_steps + 1; jj-- > 0;) {
      run = std::max(run, disc[jj]);
      while (k > 0 && t_index[k - 1] == jj) {
        --k;
        suffix[k] = run;
      }
    }
    while (k > 0) {
      --k;
      suffix[k] = run;
    }
    for (std::size_t kk = 0; kk < t_grid.size(); ++kk)
      rows[i * t_grid.size() + kk] = suffix[kk];
  };
  if (opt.mode == mc::run_mode::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < std::int64_t(n); ++i) body(std::size_t(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) body(i);
  }

  rep.decay.resize(t_grid.size());
  std::vector<double> col(n);
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) col[i] = rows[i * t_grid.size() + k];
    rep.decay[k] = mc::pairwise_sum(col) / double(n);
  }
  rep.tail_bound =
      std::exp(-p.beta * horizon) * mc::pairwise_sum(ends) / double(n);

  double final_mass = rep.decay.back() + rep.tail_bound;
  if (!std::isfinite(final_mass)) {
    rep.verdict = growth_verdict::fails;
    rep.detail = "suffix supremum overflows at the simulated horizon";
  } else if (final_mass <= threshold) {
    rep.verdict = growth_verdict::holds;
    rep.detail = "suffix supremum decays to " + format_double(final_mass);
  } else if (rep.tail_bound > threshold) {
    rep.verdict = growth_verdict::inconclusive;
    rep.detail = "horizon too short: beyond-horizon bound " +
                 format_double(rep.tail_bound) + " exceeds the threshold";
  } else {
    rep.verdict = growth_verdict::fails;
    rep.detail = "suffix supremum stalls at " + format_double(final_mass);
  }
  return rep;
}

}  // namespace pstop::shape
