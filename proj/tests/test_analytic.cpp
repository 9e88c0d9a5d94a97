#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pstop/analytic.hpp"

using namespace pstop;

// Reference values below were computed independently with 50-digit arithmetic
// from the closed forms (root solving, value matching, smooth fit) and frozen
// as decimal literals.

TEST_CASE("q_roots") {
  // sigma=0.2, mu=0.05, beta=0.1
  analytic::root_pair r = analytic::q_roots(0.2, 0.05, 0.1);
  CHECK(r.minus == doctest::Approx(-3.10849528301415095283).epsilon(1e-14));
  CHECK(r.plus == doctest::Approx(1.60849528301415095283).epsilon(1e-14));
  // at discount beta + lambda
  analytic::root_pair s = analytic::q_roots(0.2, 0.05, 1.1);
  CHECK(s.minus == doctest::Approx(-8.204025757937787003016).epsilon(1e-14));

  // the defining quadratic vanishes at both roots
  auto q = [](double sigma, double mu, double zeta, double a) {
    return 0.5 * sigma * sigma * a * (a - 1.0) + mu * a - zeta;
  };
  CHECK(q(0.2, 0.05, 0.1, r.minus) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(q(0.2, 0.05, 0.1, r.plus) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("dw_solution_constants") {
  analytic::dw_solution sol = analytic::make_dw(1.0, 0.2, 0.05, 0.1, 1.0);
  CHECK(sol.rho == doctest::Approx(0.9523809523809523809524).epsilon(1e-15));
  CHECK(sol.kappa == doctest::Approx(0.9090909090909090909091).epsilon(1e-15));
  CHECK(sol.boundary == doctest::Approx(2.249098000310689762962).epsilon(1e-13));
}

TEST_CASE("dw_values_at_probes") {
  analytic::dw_solution sol = analytic::make_dw(1.0, 0.2, 0.05, 0.1, 1.0);
  struct probe {
    double x, v;
  };
  const probe probes[] = {
      {0.1, 0.008354056577536134370387}, {0.5, 0.1112211463788691502251},
      {1.0, 0.3391506823664503433356},   {1.5, 0.6510804496852871735489},
      {2.0, 1.034184497234080740492},    {3.0, 1.949575437422841528803},
      {5.0, 3.852836908952354890059},
  };
  for (const probe& p : probes)
    CHECK(analytic::dw_value(sol, p.x) == doctest::Approx(p.v).epsilon(1e-13));
}

TEST_CASE("dw_value_matching_and_smooth_fit") {
  analytic::dw_solution sol = analytic::make_dw(1.0, 0.2, 0.05, 0.1, 1.0);
  const double L = sol.boundary, h = 1e-7;
  // continuity across the boundary
  CHECK(sol.value(L - 1e-12) == doctest::Approx(sol.value(L + 1e-12)).epsilon(1e-10));
  // smooth fit: one-sided difference quotients agree
  double dl = (sol.value(L) - sol.value(L - h)) / h;
  double dr = (sol.value(L + h) - sol.value(L)) / h;
  CHECK(dl == doctest::Approx(dr).epsilon(1e-5));
  // stopping only at event times: the value dominates psi = g lambda/(beta +
  // lambda), not g itself, and grows like rho x - kappa (rho < 1) in the money
  for (double x : {0.5, 1.0, 2.0, 4.0, 10.0})
    CHECK(sol.value(x) >= std::max(x - 1.0, 0.0) / 1.1 - 1e-12);
  CHECK(sol.value(10.0) ==
        doctest::Approx(sol.rho * 10.0 - sol.kappa).epsilon(1e-6));
}

TEST_CASE("dw_zero_drift_case") {
  analytic::dw_solution sol = analytic::make_dw(1.0, 0.2, 0.0, 0.1, 1.0);
  CHECK(sol.boundary == doctest::Approx(1.361831145998718441499).epsilon(1e-12));
  CHECK(sol.value(3.0) == doctest::Approx(1.818319569699632737192).epsilon(1e-13));
}

TEST_CASE("dw_high_rate_approaches_american") {
  analytic::dw_solution sol = analytic::make_dw(1.0, 0.2, 0.05, 0.1, 1e4);
  CHECK(sol.boundary == doctest::Approx(2.639655835274423189462).epsilon(1e-12));
  double eb = analytic::american_boundary(1.0, 0.2, 0.05, 0.1);
  CHECK(eb == doctest::Approx(2.643398113205660381132).epsilon(1e-13));
  CHECK(sol.boundary < eb);
  for (double x : {0.5, 1.0, 2.0, 3.0}) {
    double gap = std::abs(analytic::dw_value(sol, x) -
                          analytic::american_value(1.0, 0.2, 0.05, 0.1, x));
    CHECK(gap <= 2e-5);
  }
}

TEST_CASE("american_value_probes") {
  CHECK(analytic::american_value(1.0, 0.2, 0.05, 0.1, 0.5) ==
        doctest::Approx(0.1128472406956211770415).epsilon(1e-13));
  CHECK(analytic::american_value(1.0, 0.2, 0.05, 0.1, 1.0) ==
        doctest::Approx(0.344109190843246930626).epsilon(1e-13));
  CHECK(analytic::american_value(1.0, 0.2, 0.05, 0.1, 2.0) ==
        doctest::Approx(1.049304657277179277723).epsilon(1e-13));
  // above the boundary the value is the payoff
  CHECK(analytic::american_value(1.0, 0.2, 0.05, 0.1, 3.0) == doctest::Approx(2.0));
}

TEST_CASE("linear_payoff_value") {
  // rho = lambda / (lambda + beta - mu)
  CHECK(analytic::linear_payoff_value(3.0, 0.0, 2.0, 1.0) == doctest::Approx(1.0));
  CHECK(analytic::linear_payoff_value(1.0, 0.05, 0.1, 1.0) ==
        doctest::Approx(1.0 / 1.05).epsilon(1e-15));
  CHECK(analytic::linear_payoff_value(0.0, 0.0, 0.5, 2.0) == 0.0);
}

TEST_CASE("barrier_rate_value") {
  // sigma*x volatility with sigma=sqrt(2), mu=0, beta=2: alpha_minus = -1,
  // so V(x) = J^2/x above the barrier J and V(x)=x below
  const double s2 = std::sqrt(2.0);
  CHECK(analytic::barrier_rate_value(0.5, 1.0, s2, 0.0, 2.0) == doctest::Approx(0.5));
  CHECK(analytic::barrier_rate_value(1.0, 1.0, s2, 0.0, 2.0) == doctest::Approx(1.0));
  CHECK(analytic::barrier_rate_value(2.0, 1.0, s2, 0.0, 2.0) == doctest::Approx(0.5));
  CHECK(analytic::barrier_rate_value(4.0, 1.0, s2, 0.0, 2.0) == doctest::Approx(0.25));
}

TEST_CASE("sinh_solution") {
  analytic::sinh_solution sol = analytic::make_sinh(0.5);
  CHECK(sol.xi == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  // the peak is flat near the maximiser; assert the boundary loosely and the
  // value of the peak tightly
  CHECK(sol.boundary == doctest::Approx(2.395522760136721918699).epsilon(1e-6));
  CHECK(sol.peak == doctest::Approx(1.778255138124051017731).epsilon(1e-10));
  CHECK(analytic::sinh_drift_value(0.25, 0.5) ==
        doctest::Approx(0.4999031314303248880737).epsilon(1e-10));
  CHECK(analytic::sinh_drift_value(0.5, 0.5) ==
        doctest::Approx(0.8278245696860966499834).epsilon(1e-10));
  CHECK(analytic::sinh_drift_value(1.0, 0.5) ==
        doctest::Approx(1.265888798990208618414).epsilon(1e-10));
  // linear beyond the boundary
  CHECK(analytic::sinh_drift_value(sol.boundary + 1.0, 0.5) ==
        doctest::Approx(sol.boundary + 1.0).epsilon(1e-9));
  CHECK(analytic::sinh_drift_value(0.0, 0.5) == 0.0);
}

TEST_CASE("local_time_threshold_and_values") {
  // lambda = 2 gives xi = 2 and phi* = 1/(1 - e^-2)
  auto r0 = analytic::local_time_value(0.0, 1.15, 2.0);
  CHECK(r0.threshold == doctest::Approx(1.156517642749665651818).epsilon(1e-14));
  CHECK(r0.value == doctest::Approx(1.152817787861052297839).epsilon(1e-13));
  CHECK(r0.payoff == doctest::Approx(1.15));  // h_phi(0) = phi

  auto r7 = analytic::local_time_value(0.7, 1.15, 2.0);
  CHECK(r7.value == doctest::Approx(1.193883388195005861461).epsilon(1e-13));
  auto r20 = analytic::local_time_value(0.0, 1.20, 2.0);
  CHECK(r20.value == doctest::Approx(1.181201169941967615136).epsilon(1e-13));

  // payoff shape: |x| outside [-1,1], interpolated kink structure inside
  auto far = analytic::local_time_value(2.5, 1.15, 2.0);
  CHECK(far.payoff == doctest::Approx(2.5));
  // symmetric in x
  auto rm = analytic::local_time_value(-0.7, 1.15, 2.0);
  CHECK(rm.value == doctest::Approx(r7.value).epsilon(1e-14));
}

TEST_CASE("nonequality_values") {
  // beta = 1: E^x[e^{-H_0}] = e^{-sqrt(2) x}; theta(0)/(1+theta(0)) = 1/2
  auto r = analytic::nonequality_values(0.5, 1.0);
  CHECK(r.harmonic == doctest::Approx(std::exp(-std::sqrt(2.0) * 0.5)).epsilon(1e-14));
  CHECK(r.poisson == doctest::Approx(0.246534345697619893923).epsilon(1e-13));
  CHECK(r.bellman == 0.0);  // iterates collapse on (0, inf)
  CHECK(r.poisson - r.bellman > 0.1);

  auto r0 = analytic::nonequality_values(0.0, 1.0);
  CHECK(r0.poisson == doctest::Approx(0.5));
}
