#pragma once

#include "pstop/problem.hpp"
#include "pstop/quadrature.hpp"
#include "pstop/scale.hpp"

namespace pstop {

// Boundary classification of one interval endpoint via the scale function.
// With m = s(x) and eta the natural-scale volatility:
//   s(e) finite   -> accessible iff  I = int |s(x)-s(e)| / (s'(x) a(x)^2) dx < inf
//                    (accessible => absorbing under the standing assumptions,
//                     not accessible => natural)
//   s(e) infinite -> entrance  iff  J = int 1 / (s'(x) a(x)^2) dx < inf,
//                    else natural.
// Inconclusive quadrature yields kind = unclassified, never a forced verdict.
struct endpoint_report {
  endpoint_kind kind = endpoint_kind::unclassified;
  bool accessible = false;
  improper_result scale_limit;  // s(e); value is the limit when converged
  improper_result criterion;    // the I or J integral
  char which = '-';             // 'I' or 'J'
  std::string detail;
};

endpoint_report classify_endpoint(const diffusion_spec& d, const scale_map& sm, bool left_side);

struct classification {
  endpoint_report left, right;
};

classification classify_endpoints(const diffusion_spec& d, const scale_map& sm);

// Direct classification of an endpoint of a natural-scale diffusion with
// volatility eta (drift zero), marching from `from` toward `e`.
endpoint_report classify_natural_scale(const real_fn& eta, double from, double e);

// Kotani's non-degeneracy condition at an endpoint of a *natural-scale*
// problem: at an infinite endpoint it requires
//   int^e |y| (beta + theta(y)) / a(y)^2 dy = +inf;
// finite endpoints satisfy it vacuously.  `holds` means the condition is
// verified, `fails` that the integral converged, `inconclusive` otherwise.
enum class condition_status { holds, fails, inconclusive };

std::string to_string(condition_status s);

struct kotani_report {
  condition_status left = condition_status::inconclusive;
  condition_status right = condition_status::inconclusive;
  improper_result left_integral, right_integral;
  condition_status combined() const {
    if (left == condition_status::fails || right == condition_status::fails)
      return condition_status::fails;
    if (left == condition_status::holds && right == condition_status::holds)
      return condition_status::holds;
    return condition_status::inconclusive;
  }
};

// Requires a provably zero drift; throws std::invalid_argument otherwise.
kotani_report kotani_check(const problem_spec& p, double probe_lo, double probe_hi);

// Coefficients of the time-changed process Y used by the one-step operator
// identity G(x) = E[psi(Y_T)], T ~ Exp(1):
//   a_Y = a / sqrt(beta + theta),  b_Y = b / (beta + theta).
// Declared-infinite rate regions give a_Y = b_Y = 0 (the process freezes,
// matching an immediate event).  `capped` applies the numerical rate cap
// instead of the exact infinite limit.
diffusion_spec time_change_coefficients(const problem_spec& p, bool capped);

// The same stopping problem rewritten in natural scale m = s(x):
// eta(m) = (a s') o s^{-1}, payoff/rate composed with s^{-1}, domain mapped
// through the scale limits.  Coefficients are in-process callables; the
// scale_map must outlive the returned problem.
problem_spec to_natural_scale(const problem_spec& p, const scale_map& sm);

}  // namespace pstop
