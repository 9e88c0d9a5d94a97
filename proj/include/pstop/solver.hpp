#pragma once

#include <string>
#include <vector>

#include "pstop/grid.hpp"
#include "pstop/problem.hpp"
#include "pstop/validate.hpp"
#include "pstop/value_function.hpp"

namespace pstop {

// Boundary treatment for one edge of the grid.
//   automatic: absorbing_value when the edge node sits on an absorbing
//     endpoint, vanishing_second_difference otherwise.
//   absorbing_value: Dirichlet u(e) = h(e) theta(e) / (beta + theta(e)); the
//     chain is frozen at e so the first arrival is exponential(theta(e)).
//   vanishing_second_difference: linear extrapolation through the two nodes
//     next to the edge (the default at truncated natural endpoints).
//   power_law: u proportional to x^exponent near the edge; exact for the
//     exponential-Brownian oracles.
enum class boundary_kind {
  automatic,
  absorbing_value,
  vanishing_second_difference,
  power_law,
};

struct boundary_policy {
  boundary_kind kind = boundary_kind::automatic;
  double exponent = 0.0;  // power_law only
};

inline boundary_policy power_tail(double exponent) {
  return {boundary_kind::power_law, exponent};
}

struct solve_options {
  boundary_policy left{};
  boundary_policy right{};
  double tol = 1e-8;     // sup-norm increment threshold
  long max_iter = 10000;
  bool validate = true;
  // Proceed even when a standing assumption definitively fails.
  bool allow_assumption_failures = false;
};

struct iteration_report {
  long iterations = 0;
  std::vector<double> increments;  // sup norm of V^(n+1) - V^(n)
  bool converged = false;
  double final_residual = 0.0;
  double wall_seconds = 0.0;
  bool validated = false;
  assumption_report assumptions;
  std::string warning;  // non-empty when SA3 failed and iteration went ahead

  bool sa3_failed() const {
    return validated && assumptions.sa3.status == check_status::fail;
  }
};

// One application of the first-arrival value operator
// u(x) = E^x[e^{-beta T1} h(X_{T1})] discretized as the two-point boundary
// problem (1/2) a^2 u'' + b u' - (beta + theta) u + theta h = 0.  Central
// second differences; drift terms switch to the upwind side node-by-node
// whenever the central stencil would break the M-matrix sign pattern.  The
// tridiagonal factorization is computed once and reused across applications.
class discrete_operator {
 public:
  discrete_operator(const problem_spec& p, const grid& g,
                    boundary_policy left = {}, boundary_policy right = {});

  // h, u, scratch are node vectors; u and scratch are resized as needed.
  void apply_into(const std::vector<double>& h, std::vector<double>& u,
                  std::vector<double>& scratch) const;
  std::vector<double> apply(const std::vector<double>& h) const;

  // One Bellman step v <- G(max(payoff, v)) fused into two sweeps; returns
  // the sup-norm increment.  This is the kernel of value_iteration, where
  // large constant rates need ~1e6 cheap iterations.
  double bellman_step(std::vector<double>& v, std::vector<double>& scratch) const;

  // Attach the tail rules implied by the boundary policies.
  value_function wrap(std::vector<double> u) const;

  const grid& mesh() const { return g_; }
  const std::vector<double>& payoff() const { return gval_; }
  const std::vector<double>& rate() const { return theta_; }
  boundary_kind left_kind() const { return lkind_; }
  boundary_kind right_kind() const { return rkind_; }

 private:
  grid g_;
  double beta_ = 0.0;
  std::vector<double> gval_, theta_;
  std::vector<double> lower_, winv_, q_;  // factored tridiagonal
  boundary_kind lkind_ = boundary_kind::automatic;
  boundary_kind rkind_ = boundary_kind::automatic;
  double l_factor_ = 0.0, r_factor_ = 0.0;  // Dirichlet psi factors
  double l_ratio_ = 0.0, r_ratio_ = 0.0;    // extrapolation ratios
  double l_exponent_ = 0.0, r_exponent_ = 0.0;
};

// Probe range for assumption validation: the grid span, pulled off any node
// that sits on an absorbing endpoint.
std::pair<double, double> probe_range(const problem_spec& p, const grid& g);

// Validate and throw unless the report passes or failures are allowed.
assumption_report validate_for_solve(const problem_spec& p, const grid& g,
                                     const solve_options& opt);

// u = E^x[e^{-beta T1} h(X_{T1})] for a fixed payoff-like h.
value_function g_operator(const problem_spec& p, const scalar_function& h,
                          const grid& g, const solve_options& opt = {});
value_function g_operator(const problem_spec& p, const value_function& h,
                          const grid& g, const solve_options& opt = {});

struct solve_result {
  value_function value;
  iteration_report report;
};

// Monotone value iteration V^(0) = 0, V^(n+1) = G(max(g, V^(n))); stops when
// the sup-norm increment drops below tol or at max_iter.  An SA3 failure is
// reported as a warning (the limit may then differ from the value function)
// but does not stop the solve.
solve_result value_iteration(const problem_spec& p, const grid& g,
                             const solve_options& opt = {});

// Sup norm of the discrete feedback-equation residual
// (1/2) a^2 V'' + b V' - (beta + theta) V + theta max(g, V)
// over interior nodes, excluding a 2-node collar around payoff/value
// crossings (the value is not C^2 across a free boundary) and the two nodes
// adjacent to each edge.
double residual(const problem_spec& p, const value_function& V);

// H = max(g, V) on the nodes of V.
value_function conditional_value(const problem_spec& p, const value_function& V);

}  // namespace pstop
