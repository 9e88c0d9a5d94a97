#pragma once

#include <functional>
#include <limits>
#include <string>

namespace pstop {

using real_fn = std::function<double(double)>;

// Adaptive Gauss-Kronrod 7-15 on a compact interval.
struct quad_result {
  double value = 0.0;
  double error = 0.0;     // estimated absolute error
  bool converged = false;
  // When the integrand was non-finite on an unresolvably small panel, its
  // approximate location (NaN otherwise).
  double bad_point = std::numeric_limits<double>::quiet_NaN();
};

quad_result integrate(const real_fn& f, double a, double b, double abs_tol = 1e-12,
                      double rel_tol = 1e-10, int max_depth = 48);

// Improper integral of f from `from` toward the (possibly infinite) endpoint
// `toward`, by geometric shells.  Divergence is declared when partial sums
// grow by a factor >= 10 across four consecutive shell levels, or when shell
// contributions stop shrinking across the full level budget (the signature of
// logarithmic divergence).  Anything else that fails to settle within the
// budget is reported as inconclusive rather than forced into a verdict.
enum class improper_status { converged, diverged, inconclusive };

std::string to_string(improper_status s);

struct improper_result {
  improper_status status = improper_status::inconclusive;
  double value = std::numeric_limits<double>::quiet_NaN();  // finite when converged
  int levels = 0;            // shells actually evaluated
  double last_shell = 0.0;   // magnitude of the last shell contribution
  std::string detail;
};

struct improper_options {
  int max_levels = 48;
  double abs_floor = 1e-13;  // scale below which shell contributions count as zero
  double rel_tol = 1e-9;
  double panel_abs_tol = 1e-14;
  double panel_rel_tol = 1e-10;
};

improper_result integrate_toward(const real_fn& f, double from, double toward,
                                 const improper_options& opt = {});

}  // namespace pstop
