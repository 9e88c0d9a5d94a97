#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "pstop/analytic.hpp"
#include "pstop/problem.hpp"
#include "pstop/shape.hpp"
#include "pstop/value_function.hpp"

using namespace pstop;

namespace {

std::string problems_dir() { return PSTOP_PROBLEMS_DIR; }

problem_spec load(const char* name) {
  return load_problem(problems_dir() + "/" + std::string(name) + ".json");
}

value_function sample_uniform(double lo, double hi, std::size_t n,
                              double (*f)(double)) {
  return value_function::sample(grid::uniform(lo, hi, n), f);
}

}  // namespace

TEST_CASE("shape_checks_on_elementary_functions") {
  // affine: the 8-ulp curvature floor lets both curvature checks pass at
  // tol = 0
  value_function aff =
      sample_uniform(-2.0, 2.0, 301, [](double x) { return 3.0 - 0.5 * x; });
  CHECK(shape::check_convex(aff, 0.0).holds);
  CHECK(shape::check_concave(aff, 0.0).holds);
  shape::shape_report m = shape::check_monotone(aff, 0.0);
  CHECK(!m.holds);
  CHECK(m.magnitude > 0.0);
  CHECK(m.x_lo < m.x_hi);

  value_function sq =
      sample_uniform(-2.0, 2.0, 301, [](double x) { return x * x; });
  CHECK(shape::check_convex(sq, 0.0).holds);
  shape::shape_report c = shape::check_concave(sq, 0.0);
  CHECK(!c.holds);
  CHECK(c.x_lo < c.x_mid);
  CHECK(c.x_mid < c.x_hi);
  CHECK(!c.detail.empty());

  value_function inc =
      sample_uniform(0.0, 5.0, 301, [](double x) { return std::atan(x); });
  CHECK(shape::check_monotone(inc, 0.0).holds);
}

TEST_CASE("kinked_payoff_convexity_threshold") {
  // At rate lambda = 2 the expected-payoff transform is convex exactly up to
  // phi* = 1/(1 - e^{-2}); 1.15 and 1.20 bracket it.
  const double lambda = 2.0;
  const std::size_t n = 2001;
  grid g = grid::uniform(-3.0, 3.0, n);

  auto sample_H = [&](double phi) {
    return value_function::sample(g, [&](double x) {
      return analytic::local_time_value(x, phi, lambda).value;
    });
  };

  CHECK(shape::check_convex(sample_H(1.15), 1e-9).holds);
  shape::shape_report bad = shape::check_convex(sample_H(1.20), 1e-9);
  CHECK(!bad.holds);
  CHECK(bad.magnitude > 0.0);
  // the kink at the origin is where convexity breaks
  CHECK(std::abs(bad.x_mid) < 0.01);

  double star = analytic::local_time_value(0.0, 1.15, lambda).threshold;
  CHECK(star == doctest::Approx(1.156517642749665651818).epsilon(1e-14));
  CHECK(1.15 < star);
  CHECK(star < 1.20);
}

TEST_CASE("hypothesis_detection_constant_psi") {
  problem_spec p = load("psi_half");
  shape::hypothesis_report h = shape::detect_hypotheses(p, 0.02, 50.0);
  CHECK(h.natural_scale);
  CHECK(h.kotani == condition_status::holds);
  // psi is the constant 1/2: weakly increasing, convex, and concave
  CHECK(h.psi_increasing);
  CHECK(h.psi_convex);
  CHECK(h.psi_concave);
  // theta = beta/(1+2x) decreases
  CHECK(!h.theta_increasing);

  problem_spec gbm = load("dw");
  shape::hypothesis_report hg = shape::detect_hypotheses(gbm, 0.1, 10.0);
  CHECK(!hg.natural_scale);
  CHECK(hg.theta_increasing);  // constant rate
  CHECK(hg.psi_increasing);    // psi = (x-1)^+ / 1.1
  CHECK(hg.psi_convex);
}

TEST_CASE("suite_generator_is_seed_deterministic") {
  shape::shape_suite a = shape::build_shape_suite(20260814);
  shape::shape_suite b = shape::build_shape_suite(20260814);
  REQUIRE(a.monotone.size() == b.monotone.size());
  CHECK(a.monotone.size() == 20);
  CHECK(a.convex.size() == 20);
  CHECK(!a.concave.empty());
  CHECK(a.counterexamples.size() >= 2);
  for (std::size_t i = 0; i < a.monotone.size(); ++i) {
    CHECK(a.monotone[i].name == b.monotone[i].name);
    CHECK(a.monotone[i].beta == b.monotone[i].beta);
    CHECK(a.monotone[i].rate(1.0) == b.monotone[i].rate(1.0));
  }
  shape::shape_suite c = shape::build_shape_suite(7);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.monotone.size(); ++i)
    any_diff = any_diff || a.monotone[i].rate(1.0) != c.monotone[i].rate(1.0);
  CHECK(any_diff);
}

TEST_CASE("theorem_suite_on_classics_and_counterexamples") {
  std::vector<problem_spec> ps = {load("psi_half"), load("eg2_2"),
                                  load("eg2_4")};
  shape::suite_report rep = shape::verify_shape_theorems(ps, 501, 1e-6);
  REQUIRE(rep.entries.size() == 3);
  CHECK(rep.all_ok);  // counterexamples violate hypotheses, not theorems

  const shape::suite_entry& ph = rep.entries[0];
  CHECK(ph.convex_applicable);
  CHECK(ph.convex_ok);
  CHECK(ph.domination_ok);
  CHECK(ph.concave_applicable);
  CHECK(ph.concave_ok);
  CHECK(ph.fixed_after_first_ok);
  CHECK(!ph.hard_fail);

  // positive drift: scale is not natural, so no convexity claim is made,
  // and the raw convexity check indeed fails with a witness
  const shape::suite_entry& e22 = rep.entries[1];
  CHECK(e22.monotone_applicable);
  CHECK(e22.monotone_ok);
  CHECK(!e22.convex_applicable);
  CHECK(e22.detail.find("convex:no") != std::string::npos);
  CHECK(e22.detail.find("second difference") != std::string::npos);

  // barrier rate: theta decreasing and psi non-monotone, no monotone claim,
  // and the raw monotone check fails with a witness
  const shape::suite_entry& e24 = rep.entries[2];
  CHECK(!e24.monotone_applicable);
  CHECK(!e24.convex_applicable);
  CHECK(e24.detail.find("monotone:no") != std::string::npos);
  CHECK(e24.detail.find("decreases by") != std::string::npos);
}

TEST_CASE("growth_condition_three_ways") {
  // provably bounded payoff: no simulation
  problem_spec bounded = load("eg2_5");
  mc::mc_options opt;
  opt.n_paths = 2000;
  opt.dt = 0.01;
  opt.horizon = 5.0;
  shape::growth_report b =
      shape::growth_condition_check(bounded, 0.5, {0.0}, opt, 1e-3);
  CHECK(b.bounded_shortcut);
  CHECK(b.verdict == shape::growth_verdict::holds);
  CHECK(b.decay.empty());

  // discounted geometric Brownian payoff decays at rate beta - mu
  problem_spec dw = load("dw");
  mc::mc_options og;
  og.n_paths = 2000;
  og.dt = 0.01;
  og.horizon = 150.0;
  shape::growth_report g = shape::growth_condition_check(
      dw, 1.0, {0.0, 30.0, 60.0, 100.0}, og, 0.05);
  CHECK(!g.bounded_shortcut);
  CHECK(g.verdict == shape::growth_verdict::holds);
  REQUIRE(g.decay.size() == 4);
  CHECK(g.decay[0] > g.decay[3]);
  CHECK(g.decay[3] < 0.05);  // measured 0.0082

  // super-exponential payoff: the beyond-horizon mass cannot be ruled out
  problem_spec sup;
  sup.name = "superexp";
  sup.beta = 0.5;
  sup.dyn.drift = scalar_function::from_expression("0");
  sup.dyn.vol = scalar_function::from_expression("1");
  sup.dyn.domain.left_kind = endpoint_kind::natural;
  sup.dyn.domain.right_kind = endpoint_kind::natural;
  sup.payoff = scalar_function::from_expression("exp(x^2)");
  sup.rate = scalar_function::from_expression("1");
  shape::growth_report s =
      shape::growth_condition_check(sup, 0.0, {0.0, 2.0, 4.0}, opt, 0.05);
  CHECK(s.verdict != shape::growth_verdict::holds);
  CHECK(!s.detail.empty());
}
