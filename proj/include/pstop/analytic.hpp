#pragma once

#include <vector>

namespace pstop::analytic {

// Roots of q(alpha) = (sigma^2/2) alpha (alpha - 1) + mu alpha - zeta.
// For sigma > 0 and zeta > 0 the roots straddle zero: minus < 0 < plus.
struct root_pair {
  double minus = 0.0;
  double plus = 0.0;
};

root_pair q_roots(double sigma, double mu, double zeta);

// Exponential Brownian motion, payoff (x - strike)^+, constant event rate.
// Continuation value p x^{alpha_plus} below the boundary, rho x - kappa +
// c x^{alpha_minus} above it, glued by value matching and smooth fit.
struct dw_solution {
  double strike = 1.0;
  double sigma = 0.0;
  double mu = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  double alpha_plus = 0.0;   // positive root at discount beta
  double alpha_minus = 0.0;  // negative root at discount beta + lambda
  double rho = 0.0;
  double kappa = 0.0;
  double boundary = 0.0;  // threshold where the value meets the payoff
  double p = 0.0;
  double c = 0.0;

  double value(double x) const;
};

dw_solution make_dw(double strike, double sigma, double mu, double beta,
                    double lambda);
double dw_value(const dw_solution& sol, double x);

double american_boundary(double strike, double sigma, double mu, double beta);
double american_value(double strike, double sigma, double mu, double beta,
                      double x);

// Linear payoff g(x) = x with constant event rate: stop at the first event,
// value rho x with rho = lambda / (lambda + beta - mu).
double linear_payoff_value(double x, double mu, double beta, double lambda);

// Same dynamics but the rate is infinite at or below the barrier and zero
// above it: value x up to the barrier, power tail beyond it.
double barrier_rate_value(double x, double barrier, double sigma, double mu,
                          double beta);

// Unit-drift unit-volatility Brownian motion on [0, inf) absorbed at 0,
// payoff g(x) = x, unconstrained stopping.  The value is linear beyond a
// free boundary y and a sinh profile below it; y maximises
// z e^z / sinh(z xi) with xi = sqrt(1 + 2 beta).
struct sinh_solution {
  double beta = 0.0;
  double xi = 0.0;
  double boundary = 0.0;  // free boundary y
  double peak = 0.0;      // y e^y / sinh(y xi)

  double value(double x) const;
};

sinh_solution make_sinh(double beta);
double sinh_drift_value(double x, double beta);

// Piecewise-linear payoff h_phi with kinks at -1, 0, 1 and its expectation
// H_phi at an independent exponential time for standard Brownian motion.
// H_phi is convex everywhere iff phi <= threshold = 1 / (1 - e^{-xi}).
struct local_time_values {
  double payoff = 0.0;     // h_phi(x)
  double value = 0.0;      // H_phi(x)
  double threshold = 0.0;  // convexity threshold phi*
};

local_time_values local_time_value(double x, double phi, double lambda);

// Brownian motion absorbed at 0, payoff = indicator of the origin,
// rate x^{-2} away from 0.  The iterated-Bellman limit differs from the
// value function on (0, inf).
struct nonequality_solution {
  double bellman = 0.0;   // limit of the Bellman iterates
  double poisson = 0.0;   // value function
  double harmonic = 0.0;  // E^x[e^{-beta H_0}]
};

nonequality_solution nonequality_values(double x, double beta);

template <class F>
std::vector<double> map_grid(const std::vector<double>& xs, F&& f) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(f(x));
  return out;
}

}  // namespace pstop::analytic
