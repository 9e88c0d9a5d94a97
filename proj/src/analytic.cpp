#include "pstop/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace pstop::analytic {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// log(z e^z / sinh(z xi)) for z > 0, stable for large arguments.
double log_sinh_objective(double z, double xi) {
  return std::log(z) + z - xi * z - std::log1p(-std::exp(-2.0 * xi * z)) +
         std::log(2.0);
}

}  // namespace

root_pair q_roots(double sigma, double mu, double zeta) {
  require(sigma > 0.0, "q_roots: sigma must be positive");
  require(zeta > 0.0, "q_roots: zeta must be positive");
  const double a = 0.5 * sigma * sigma;
  const double b = mu - a;
  const double c = -zeta;
  const double disc = b * b - 4.0 * a * c;  // > b^2 because a zeta > 0
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  const double r1 = q / a;
  const double r2 = c / q;
  root_pair roots;
  roots.minus = std::min(r1, r2);
  roots.plus = std::max(r1, r2);
  return roots;
}

dw_solution make_dw(double strike, double sigma, double mu, double beta,
                    double lambda) {
  require(strike > 0.0, "make_dw: strike must be positive");
  require(sigma > 0.0, "make_dw: sigma must be positive");
  require(beta > 0.0, "make_dw: beta must be positive");
  require(lambda > 0.0, "make_dw: lambda must be positive");
  require(mu < beta, "make_dw: drift must satisfy mu < beta");

  dw_solution sol;
  sol.strike = strike;
  sol.sigma = sigma;
  sol.mu = mu;
  sol.beta = beta;
  sol.lambda = lambda;
  sol.alpha_plus = q_roots(sigma, mu, beta).plus;
  sol.alpha_minus = q_roots(sigma, mu, beta + lambda).minus;
  sol.rho = lambda / (beta + lambda - mu);
  sol.kappa = lambda * strike / (beta + lambda);

  const double ap = sol.alpha_plus;
  const double am = sol.alpha_minus;
  sol.boundary = (strike * (ap - am) + am * sol.kappa) /
                 (ap - am - sol.rho * (1.0 - am));
  const double l = sol.boundary;
  sol.p = (l - strike) * std::pow(l, -ap);
  sol.c = (l - strike - sol.rho * l + sol.kappa) * std::pow(l, -am);
  return sol;
}

double dw_solution::value(double x) const {
  if (x <= 0.0) return 0.0;
  if (x <= boundary) return p * std::pow(x, alpha_plus);
  return rho * x - kappa + c * std::pow(x, alpha_minus);
}

double dw_value(const dw_solution& sol, double x) { return sol.value(x); }

double american_boundary(double strike, double sigma, double mu, double beta) {
  require(strike > 0.0, "american_boundary: strike must be positive");
  require(mu < beta, "american_boundary: drift must satisfy mu < beta");
  const double ap = q_roots(sigma, mu, beta).plus;  // > 1 because beta > mu
  return strike * ap / (ap - 1.0);
}

double american_value(double strike, double sigma, double mu, double beta,
                      double x) {
  const double m = american_boundary(strike, sigma, mu, beta);
  if (x <= 0.0) return 0.0;
  if (x >= m) return x - strike;
  const double ap = q_roots(sigma, mu, beta).plus;
  return (m - strike) * std::pow(x / m, ap);
}

double linear_payoff_value(double x, double mu, double beta, double lambda) {
  require(beta > 0.0, "linear_payoff_value: beta must be positive");
  require(lambda > 0.0, "linear_payoff_value: lambda must be positive");
  require(mu < beta, "linear_payoff_value: drift must satisfy mu < beta");
  return x * lambda / (lambda + beta - mu);
}

double barrier_rate_value(double x, double barrier, double sigma, double mu,
                          double beta) {
  require(barrier > 0.0, "barrier_rate_value: barrier must be positive");
  require(sigma > 0.0, "barrier_rate_value: sigma must be positive");
  require(beta > 0.0, "barrier_rate_value: beta must be positive");
  if (x <= barrier) return x;
  const double am = q_roots(sigma, mu, beta).minus;
  return barrier * std::pow(x / barrier, am);
}

sinh_solution make_sinh(double beta) {
  require(beta > 0.0, "make_sinh: beta must be positive");
  sinh_solution sol;
  sol.beta = beta;
  sol.xi = std::sqrt(1.0 + 2.0 * beta);

  // Coarse scan over (0, 50] to bracket the argmax, then golden-section.
  const int n_scan = 2000;
  const double step = 50.0 / n_scan;
  int best = 1;
  double best_val = log_sinh_objective(step, sol.xi);
  for (int i = 2; i <= n_scan; ++i) {
    const double v = log_sinh_objective(i * step, sol.xi);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = best > 1 ? (best - 1) * step : step * 1e-6;
  double hi = best < n_scan ? (best + 1) * step : 50.0;

  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = log_sinh_objective(x1, sol.xi);
  double f2 = log_sinh_objective(x2, sol.xi);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = log_sinh_objective(x2, sol.xi);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = log_sinh_objective(x1, sol.xi);
    }
  }
  sol.boundary = 0.5 * (lo + hi);
  sol.peak = std::exp(log_sinh_objective(sol.boundary, sol.xi));
  return sol;
}

double sinh_solution::value(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= boundary) return x;
  // y e^{y-x} sinh(x xi) / sinh(y xi), written to stay finite for large xi.
  const double y = boundary;
  return y * std::exp((y - x) * (1.0 - xi)) * std::expm1(-2.0 * xi * x) /
         std::expm1(-2.0 * xi * y);
}

double sinh_drift_value(double x, double beta) {
  return make_sinh(beta).value(x);
}

local_time_values local_time_value(double x, double phi, double lambda) {
  require(lambda > 0.0, "local_time_value: lambda must be positive");
  require(phi >= 0.0, "local_time_value: phi must be nonnegative");
  const double xi = std::sqrt(2.0 * lambda);
  local_time_values out;
  out.payoff =
      std::abs(x) +
      phi * (0.5 * (std::abs(1.0 - x) + std::abs(1.0 + x)) - std::abs(x));
  out.value = out.payoff + 0.5 * phi * std::exp(-xi * std::abs(1.0 - x)) / xi +
              0.5 * phi * std::exp(-xi * std::abs(1.0 + x)) / xi +
              (1.0 - phi) * std::exp(-xi * std::abs(x)) / xi;
  out.threshold = 1.0 / -std::expm1(-xi);
  return out;
}

nonequality_solution nonequality_values(double x, double beta) {
  require(beta > 0.0, "nonequality_values: beta must be positive");
  require(x >= 0.0, "nonequality_values: x must be nonnegative");
  nonequality_solution out;
  out.harmonic = std::exp(-std::sqrt(2.0 * beta) * x);
  out.poisson = (x > 0.0 ? out.harmonic : 1.0) / (1.0 + beta);
  out.bellman = x > 0.0 ? 0.0 : 1.0 / (1.0 + beta);
  return out;
}

}  // namespace pstop::analytic
