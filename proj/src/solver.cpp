#include "pstop/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace pstop {

namespace {

// Stencil weights for (1/2) a^2 u'' + b u' at an interior node: coefficients
// of u_{i-1} and u_{i+1}; the centre weight is -(lo + hi) exactly, so
// constants are annihilated to the last bit.
struct stencil {
  double lo = 0.0;
  double hi = 0.0;
};

stencil interior_stencil(double a2, double b, double hm, double hp) {
  const double s = hm + hp;
  stencil w;
  w.lo = a2 / (hm * s) - b * hp / (hm * s);
  w.hi = a2 / (hp * s) + b * hm / (hp * s);
  if (w.lo < 0.0 || w.hi < 0.0) {
    // One-sided drift difference on the side the drift points to.
    if (b >= 0.0) {
      w.lo = a2 / (hm * s);
      w.hi = a2 / (hp * s) + b / hp;
    } else {
      w.lo = a2 / (hm * s) - b / hm;
      w.hi = a2 / (hp * s);
    }
  }
  return w;
}

double psi_factor(const problem_spec& p, double x) {
  const double th = p.capped_rate(x);
  return th / (p.beta + th);
}

}  // namespace

discrete_operator::discrete_operator(const problem_spec& p, const grid& g,
                                     boundary_policy left,
                                     boundary_policy right)
    : g_(g), beta_(p.beta) {
  check_grid(g_);
  const std::vector<double>& x = g_.nodes;
  const std::size_t n = x.size();
  const interval_spec& iv = p.dyn.domain;

  gval_.resize(n);
  theta_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    gval_[i] = p.payoff(x[i]);
    theta_[i] = p.capped_rate(x[i]);
    if (gval_[i] < 0.0)
      throw std::invalid_argument("discrete_operator: payoff must be >= 0");
  }

  const bool l_on_absorbing = x.front() == iv.left && iv.left_closed();
  const bool r_on_absorbing = x.back() == iv.right && iv.right_closed();
  lkind_ = left.kind == boundary_kind::automatic
               ? (l_on_absorbing ? boundary_kind::absorbing_value
                                 : boundary_kind::vanishing_second_difference)
               : left.kind;
  rkind_ = right.kind == boundary_kind::automatic
               ? (r_on_absorbing ? boundary_kind::absorbing_value
                                 : boundary_kind::vanishing_second_difference)
               : right.kind;
  if (lkind_ == boundary_kind::absorbing_value && !l_on_absorbing)
    throw std::invalid_argument(
        "discrete_operator: absorbing boundary requested but the left grid "
        "edge is not an absorbing endpoint");
  if (rkind_ == boundary_kind::absorbing_value && !r_on_absorbing)
    throw std::invalid_argument(
        "discrete_operator: absorbing boundary requested but the right grid "
        "edge is not an absorbing endpoint");
  if (lkind_ == boundary_kind::power_law && x.front() <= 0.0)
    throw std::invalid_argument(
        "discrete_operator: power-law boundary needs a positive edge node");
  l_exponent_ = left.exponent;
  r_exponent_ = right.exponent;

  std::vector<double> diag(n), upper(n);
  lower_.assign(n, 0.0);

  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double a = p.dyn.vol(x[i]);
    if (!(a > 0.0))
      throw std::invalid_argument("discrete_operator: vol must be positive");
    const stencil w =
        interior_stencil(a * a, p.dyn.drift(x[i]), x[i] - x[i - 1], x[i + 1] - x[i]);
    lower_[i] = -w.lo;
    upper[i] = -w.hi;
    diag[i] = w.lo + w.hi + beta_ + theta_[i];
  }

  // Left edge row.
  diag[0] = 1.0;
  upper[0] = 0.0;
  switch (lkind_) {
    case boundary_kind::absorbing_value:
      l_factor_ = psi_factor(p, x[0]);
      break;
    case boundary_kind::vanishing_second_difference: {
      l_ratio_ = (x[1] - x[0]) / (x[2] - x[1]);
      diag[1] += lower_[1] * (1.0 + l_ratio_);
      upper[1] -= lower_[1] * l_ratio_;
      lower_[1] = 0.0;
      break;
    }
    case boundary_kind::power_law:
      upper[0] = -std::pow(x[0] / x[1], l_exponent_);
      break;
    case boundary_kind::automatic:
      break;  // unreachable
  }

  // Right edge row.
  const std::size_t m = n - 1;
  diag[m] = 1.0;
  lower_[m] = 0.0;
  switch (rkind_) {
    case boundary_kind::absorbing_value:
      r_factor_ = psi_factor(p, x[m]);
      break;
    case boundary_kind::vanishing_second_difference: {
      r_ratio_ = (x[m] - x[m - 1]) / (x[m - 1] - x[m - 2]);
      diag[m - 1] += upper[m - 1] * (1.0 + r_ratio_);
      lower_[m - 1] -= upper[m - 1] * r_ratio_;
      upper[m - 1] = 0.0;
      break;
    }
    case boundary_kind::power_law:
      lower_[m] = -std::pow(x[m] / x[m - 1], r_exponent_);
      break;
    case boundary_kind::automatic:
      break;  // unreachable
  }

  winv_.resize(n);
  q_.resize(n);
  double w0 = diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) w0 = diag[i] - lower_[i] * q_[i - 1];
    if (!(std::abs(w0) > 1e-300))
      throw std::runtime_error(
          "discrete_operator: singular tridiagonal system near x = " +
          std::to_string(x[i]) + " (node " + std::to_string(i) + " of " +
          std::to_string(n) + ")");
    winv_[i] = 1.0 / w0;
    q_[i] = upper[i] * winv_[i];
  }
}

void discrete_operator::apply_into(const std::vector<double>& h,
                                   std::vector<double>& u,
                                   std::vector<double>& scratch) const {
  const std::size_t n = g_.size();
  if (h.size() != n)
    throw std::invalid_argument("discrete_operator: h has wrong length");
  u.resize(n);
  scratch.resize(n);

  // Forward sweep with the right-hand side built on the fly.
  double rhs0 = lkind_ == boundary_kind::absorbing_value ? l_factor_ * h[0] : 0.0;
  scratch[0] = rhs0 * winv_[0];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double rhs = theta_[i] * h[i];
    scratch[i] = (rhs - lower_[i] * scratch[i - 1]) * winv_[i];
  }
  const std::size_t m = n - 1;
  const double rhsm =
      rkind_ == boundary_kind::absorbing_value ? r_factor_ * h[m] : 0.0;
  scratch[m] = (rhsm - lower_[m] * scratch[m - 1]) * winv_[m];

  u[m] = scratch[m];
  for (std::size_t i = m; i-- > 0;) u[i] = scratch[i] - q_[i] * u[i + 1];

  if (lkind_ == boundary_kind::vanishing_second_difference)
    u[0] = std::max(0.0, (1.0 + l_ratio_) * u[1] - l_ratio_ * u[2]);
  if (rkind_ == boundary_kind::vanishing_second_difference)
    u[m] = std::max(0.0, (1.0 + r_ratio_) * u[m - 1] - r_ratio_ * u[m - 2]);
}

std::vector<double> discrete_operator::apply(const std::vector<double>& h) const {
  std::vector<double> u, scratch;
  apply_into(h, u, scratch);
  return u;
}

double discrete_operator::bellman_step(std::vector<double>& v,
                                       std::vector<double>& scratch) const {
  const std::size_t n = g_.size();
  scratch.resize(n);
  const double* gv = gval_.data();
  const double* th = theta_.data();
  const double* lo = lower_.data();
  const double* wi = winv_.data();
  const double* qq = q_.data();
  double* vv = v.data();
  double* z = scratch.data();

  const double rhs0 = lkind_ == boundary_kind::absorbing_value
                          ? l_factor_ * std::max(gv[0], vv[0])
                          : 0.0;
  z[0] = rhs0 * wi[0];
  for (std::size_t i = 1; i + 1 < n; ++i)
    z[i] = (th[i] * std::max(gv[i], vv[i]) - lo[i] * z[i - 1]) * wi[i];
  const std::size_t m = n - 1;
  const double rhsm = rkind_ == boundary_kind::absorbing_value
                          ? r_factor_ * std::max(gv[m], vv[m])
                          : 0.0;
  z[m] = (rhsm - lo[m] * z[m - 1]) * wi[m];

  // Edge nodes are settled after the sweep (the vanishing-second-difference
  // rows are placeholders), so their increments are taken at the end.
  const double old0 = vv[0];
  const double oldm = vv[m];
  double inc = 0.0;
  vv[m] = z[m];
  for (std::size_t i = m; i-- > 0;) {
    const double u = z[i] - qq[i] * vv[i + 1];
    if (i != 0) inc = std::max(inc, std::abs(u - vv[i]));
    vv[i] = u;
  }
  if (lkind_ == boundary_kind::vanishing_second_difference)
    vv[0] = std::max(0.0, (1.0 + l_ratio_) * vv[1] - l_ratio_ * vv[2]);
  if (rkind_ == boundary_kind::vanishing_second_difference)
    vv[m] = std::max(0.0, (1.0 + r_ratio_) * vv[m - 1] - r_ratio_ * vv[m - 2]);
  inc = std::max(inc, std::abs(vv[0] - old0));
  inc = std::max(inc, std::abs(vv[m] - oldm));
  return inc;
}

value_function discrete_operator::wrap(std::vector<double> u) const {
  value_function f = value_function::from_values(g_, std::move(u));
  switch (lkind_) {
    case boundary_kind::vanishing_second_difference:
      f.left_tail = tail_rule::linear;
      break;
    case boundary_kind::power_law:
      f.left_tail = tail_rule::power;
      f.left_exponent = l_exponent_;
      break;
    default:
      f.left_tail = tail_rule::hold;
  }
  switch (rkind_) {
    case boundary_kind::vanishing_second_difference:
      f.right_tail = tail_rule::linear;
      break;
    case boundary_kind::power_law:
      f.right_tail = tail_rule::power;
      f.right_exponent = r_exponent_;
      break;
    default:
      f.right_tail = tail_rule::hold;
  }
  return f;
}

std::pair<double, double> probe_range(const problem_spec& p, const grid& g) {
  const interval_spec& iv = p.dyn.domain;
  double lo = g.lo(), hi = g.hi();
  if (lo == iv.left && iv.left_closed()) lo = g.nodes[1];
  if (hi == iv.right && iv.right_closed()) hi = g.nodes[g.size() - 2];
  return {lo, hi};
}

assumption_report validate_for_solve(const problem_spec& p, const grid& g,
                                     const solve_options& opt) {
  auto [lo, hi] = probe_range(p, g);
  assumption_report rep = validate_problem(p, lo, hi);
  const bool hard_fail = rep.sa1.status == check_status::fail ||
                         rep.sa2.status == check_status::fail;
  if (hard_fail && !opt.allow_assumption_failures)
    throw std::runtime_error("standing assumptions fail: " + rep.summary());
  return rep;
}

namespace {

std::vector<double> sample_nodes(const scalar_function& h, const grid& g) {
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = h(g.nodes[i]);
  return out;
}

// When the arrival integral diverges at an attainable endpoint (SA3 fails)
// the first arrival precedes absorption almost surely, so the iterates never
// collect the endpoint stopping value.  The Dirichlet row would inject it
// anyway — the divergent hazard lives below the first interior node — so
// resolve `automatic` there to the extrapolating row instead.
void drop_unreachable_absorbing(const problem_spec& p, const grid& g,
                                const assumption_report& rep,
                                solve_options& opt) {
  if (rep.sa3.status != check_status::fail) return;
  const interval_spec& iv = p.dyn.domain;
  if (opt.left.kind == boundary_kind::automatic && g.lo() == iv.left &&
      iv.left_closed())
    opt.left.kind = boundary_kind::vanishing_second_difference;
  if (opt.right.kind == boundary_kind::automatic && g.hi() == iv.right &&
      iv.right_closed())
    opt.right.kind = boundary_kind::vanishing_second_difference;
}

}  // namespace

value_function g_operator(const problem_spec& p, const scalar_function& h,
                          const grid& g, const solve_options& opt) {
  solve_options o = opt;
  if (opt.validate) drop_unreachable_absorbing(p, g, validate_for_solve(p, g, opt), o);
  discrete_operator op(p, g, o.left, o.right);
  return op.wrap(op.apply(sample_nodes(h, g)));
}

value_function g_operator(const problem_spec& p, const value_function& h,
                          const grid& g, const solve_options& opt) {
  solve_options o = opt;
  if (opt.validate) drop_unreachable_absorbing(p, g, validate_for_solve(p, g, opt), o);
  discrete_operator op(p, g, o.left, o.right);
  std::vector<double> hv(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) hv[i] = h(g.nodes[i]);
  return op.wrap(op.apply(hv));
}

solve_result value_iteration(const problem_spec& p, const grid& g,
                             const solve_options& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  solve_result out;
  iteration_report& rep = out.report;

  solve_options o = opt;
  if (opt.validate) {
    rep.assumptions = validate_for_solve(p, g, opt);
    rep.validated = true;
    if (rep.assumptions.sa3.status == check_status::fail)
      rep.warning =
          "SA3 fails (" + rep.assumptions.sa3.detail +
          "); the iteration limit may differ from the value function";
    drop_unreachable_absorbing(p, g, rep.assumptions, o);
  }

  discrete_operator op(p, g, o.left, o.right);
  const std::size_t n = g.size();

  std::vector<double> v(n, 0.0), scratch(n);
  rep.increments.reserve(static_cast<std::size_t>(std::min(opt.max_iter, 100000L)));
  while (rep.iterations < opt.max_iter) {
    const double inc = op.bellman_step(v, scratch);
    rep.increments.push_back(inc);
    ++rep.iterations;
    if (inc < opt.tol) {
      rep.converged = true;
      break;
    }
  }

  out.value = op.wrap(std::move(v));
  rep.final_residual = residual(p, out.value);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

double residual(const problem_spec& p, const value_function& V) {
  const std::vector<double>& x = V.g.nodes;
  const std::size_t n = x.size();
  if (n < 5) return 0.0;

  std::vector<double> gv(n);
  for (std::size_t i = 0; i < n; ++i) gv[i] = p.payoff(x[i]);

  // Collar out payoff/value crossings: V is C^0 but not C^2 there.
  std::vector<bool> skip(n, false);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = gv[i] - V.v[i];
    const double b = gv[i + 1] - V.v[i + 1];
    if (a == 0.0 || a * b < 0.0) {
      const std::size_t lo = i >= 2 ? i - 2 : 0;
      const std::size_t hi = std::min(n - 1, i + 3);
      for (std::size_t j = lo; j <= hi; ++j) skip[j] = true;
    }
  }

  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    if (skip[i]) continue;
    const double a = p.dyn.vol(x[i]);
    const double th = p.capped_rate(x[i]);
    const stencil w = interior_stencil(a * a, p.dyn.drift(x[i]),
                                       x[i] - x[i - 1], x[i + 1] - x[i]);
    const double lop = w.lo * V.v[i - 1] - (w.lo + w.hi) * V.v[i] + w.hi * V.v[i + 1];
    const double r = lop - (p.beta + th) * V.v[i] + th * std::max(gv[i], V.v[i]);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

value_function conditional_value(const problem_spec& p, const value_function& V) {
  value_function h = V;
  for (std::size_t i = 0; i < h.v.size(); ++i)
    h.v[i] = std::max(h.v[i], p.payoff(h.g.nodes[i]));
  return h;
}

}  // namespace pstop
