#pragma once

#include <cstdint>

#include "pstop/paths.hpp"
#include "pstop/problem.hpp"

namespace pstop::mc {

struct mc_options {
  std::size_t n_paths = 100000;
  double dt = 0.01;
  double horizon = 0.0;  // <= 0: defaults to 40/beta
  std::uint64_t seed = 42;
  run_mode mode = run_mode::parallel;
  double unfinished_threshold = 1e-6;  // warn above this mass

  double resolved_horizon(double beta) const {
    return horizon > 0.0 ? horizon : 40.0 / beta;
  }
};

struct estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  double unfinished_fraction = 0.0;  // paths cut off by the horizon
  double bias_bound = 0.0;  // e^(-beta*horizon) * mean tail payoff of those
  std::uint64_t seed = 0;

  // |value - other.value| within k combined standard errors.
  bool consistent_with(const estimate& other, double k = 3.0) const;
};

// Discounted value of stopping at the first event with state >= threshold:
// E^x[e^(-beta tau) g(X_tau)], tau = first thinned event time with
// X >= threshold.  Events arrive by an exponential-race thinning of the
// capped rate, piecewise constant over steps; states at event times come
// from an exact sub-step of the path scheme.  Paths absorbed at an endpoint
// finish analytically (the remaining arrival time is exponential).
estimate evaluate_policy(const problem_spec& p, double threshold, double x0,
                         const mc_options& opt);

// G_theta(x0) = E^x0[e^(-beta T1) g(X_T1)]: stop at the first event
// regardless of state.  Identical draws to evaluate_policy with an
// always-true threshold.
estimate estimate_G_direct(const problem_spec& p, double x0,
                           const mc_options& opt);

// The same expectation through the time-change identity: simulate the
// rescaled process Y (drift b/(beta+theta), volatility a/sqrt(beta+theta))
// to an independent unit-rate exponential time T and average psi(Y_T).
estimate estimate_G_time_changed(const problem_spec& p, double x0,
                                 const mc_options& opt);

struct g_estimates {
  estimate direct;
  estimate time_changed;
  // discrepancy in units of the combined standard error
  double discrepancy_sigmas() const;
};

g_estimates estimate_G(const problem_spec& p, double x0, const mc_options& opt);

}  // namespace pstop::mc
