#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pstop/classify.hpp"
#include "pstop/estimators.hpp"
#include "pstop/problem.hpp"
#include "pstop/solver.hpp"
#include "pstop/value_function.hpp"

namespace pstop::shape {

enum class property { monotone_increasing, convex, concave };

std::string to_string(property p);

// Verdict of one shape check.  A failing verdict always carries a witness:
// the worst violating node pair (monotone) or triple (curvature) and the
// violation magnitude.  Tolerances are relative to scale = max |value|,
// with an 8-ulp floor so affine inputs pass curvature checks at tol = 0.
struct shape_report {
  property prop = property::monotone_increasing;
  bool holds = true;
  double tol = 0.0;    // relative tolerance requested
  double scale = 0.0;  // max |value| over the nodes
  double magnitude = 0.0;  // worst violation (0 when holds)
  std::size_t index = 0;   // node index anchoring the witness
  double x_lo = 0.0, x_mid = 0.0, x_hi = 0.0;  // witness abscissae
  std::string detail;
};

shape_report check_monotone(const value_function& v, double rel_tol = 1e-6);
shape_report check_convex(const value_function& v, double rel_tol = 1e-6);
shape_report check_concave(const value_function& v, double rel_tol = 1e-6);

// Numeric detection of the theorem hypotheses on a dense probe grid.
// Borderline means a violation within the guard band: the property is
// neither clearly satisfied nor clearly violated, and hard assertions
// should skip the problem.
struct hypothesis_report {
  bool theta_increasing = false, theta_borderline = false;
  bool psi_increasing = false, psi_increasing_borderline = false;
  bool psi_convex = false, psi_convex_borderline = false;
  bool psi_concave = false, psi_concave_borderline = false;
  bool natural_scale = false;       // provably zero drift
  condition_status kotani = condition_status::inconclusive;
};

hypothesis_report detect_hypotheses(const problem_spec& p, double probe_lo,
                                    double probe_hi);

// One problem's outcome inside verify_shape_theorems.
struct suite_entry {
  std::string name;
  hypothesis_report hyp;
  // which implications applied and whether their conclusions held
  bool monotone_applicable = false, monotone_ok = true;
  bool convex_applicable = false, convex_ok = true;
  bool domination_ok = true;       // G_theta >= psi (with convexity)
  bool concave_applicable = false, concave_ok = true;
  bool fixed_after_first_ok = true;  // concave psi: increment after n=1 <= tol
  bool hard_fail = false;
  std::string detail;
};

struct suite_report {
  std::vector<suite_entry> entries;
  bool all_ok = true;
  std::string summary() const;
};

// Solve each problem and assert the shape theorems whose hypotheses it
// satisfies: (i) theta and psi increasing => V increasing; (ii) natural
// scale + Kotani + psi convex => V convex and G_theta >= psi; (iii) natural
// scale + Kotani + psi concave => V = G_theta (fixed after one iteration)
// and V concave.  Counterexample problems (hypotheses violated) are
// reported in the "not applicable" bucket, never as theorem failures.
suite_report verify_shape_theorems(const std::vector<problem_spec>& problems,
                                   std::size_t grid_nodes = 2001,
                                   double shape_tol = 1e-6);

// Randomized suite generator: `monotone` problems satisfy hypothesis (i),
// `convex` satisfy (ii), `concave` satisfy (iii); all are natural-scale
// with expression-string coefficients, deterministic in seed.
struct shape_suite {
  std::vector<problem_spec> monotone;
  std::vector<problem_spec> convex;
  std::vector<problem_spec> concave;
  std::vector<problem_spec> counterexamples;  // hypothesis-violating classics
};

shape_suite build_shape_suite(std::uint64_t seed);

// Growth condition governing V^(infinity) = V: decay of
// t -> E^x[ sup_{s >= t} e^(-beta s) g(X_s) ].
enum class growth_verdict { holds, fails, inconclusive };

std::string to_string(growth_verdict v);

struct growth_report {
  growth_verdict verdict = growth_verdict::inconclusive;
  bool bounded_shortcut = false;  // g provably bounded: holds without MC
  std::vector<double> t;          // probe times
  std::vector<double> decay;      // MC estimate of the suffix supremum at t
  double tail_bound = 0.0;  // e^(-beta H) * mean g(X_H): beyond-horizon mass
  double threshold = 0.0;
  std::string detail;
};

growth_report growth_condition_check(const problem_spec& p, double x0,
                                     const std::vector<double>& t_grid,
                                     const mc::mc_options& opt,
                                     double threshold = 1e-3);

}  // namespace pstop::shape
