#pragma once

#include "pstop/classify.hpp"
#include "pstop/problem.hpp"

namespace pstop {

enum class check_status { pass, fail, inconclusive };

std::string to_string(check_status s);

struct assumption_check {
  check_status status = check_status::inconclusive;
  std::string detail;
};

// Report on the three standing assumptions over a working range [lo, hi]
// inside the state space:
//
//   SA1: a > 0 and 1/a^2, |b|/a^2 locally integrable on the state space
//        (including absorbing endpoints); payoff g >= 0 and finite.  The
//        growth condition on g is not checked here (see
//        shape::growth_condition_check).
//   SA2: attainable endpoints are absorbing and carried in the state space;
//        endpoints are classified via the scale function.  Entrance endpoints
//        are unreachable from the interior and are treated like natural ones.
//   SA3: theta/a^2 locally integrable on the interior, and at each attainable
//        endpoint e: int_e theta |s - s(e)| / (s' a^2) dx < inf with theta(e)
//        finite.
//
// Rates use raw values so genuine blow-ups (Example 2.5's theta = x^-2) are
// seen by the quadrature; only declared-infinite barrier levels - which model
// immediate stopping, not an integrable rate - are replaced by the numerical
// cap.
struct assumption_report {
  assumption_check sa1, sa2, sa3;
  classification endpoints;

  bool pass() const {
    return sa1.status == check_status::pass && sa2.status == check_status::pass &&
           sa3.status == check_status::pass;
  }
  bool definite_fail() const {
    return sa1.status == check_status::fail || sa2.status == check_status::fail ||
           sa3.status == check_status::fail;
  }
  std::string summary() const;
};

// Rate for validation purposes: raw theta, with declared-infinite levels
// replaced by the cap.
double validation_rate(const problem_spec& p, double x);

assumption_report validate_problem(const problem_spec& p, double probe_lo, double probe_hi);

}  // namespace pstop
