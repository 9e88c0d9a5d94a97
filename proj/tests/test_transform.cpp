#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "pstop/classify.hpp"
#include "pstop/problem.hpp"
#include "pstop/scale.hpp"
#include "pstop/validate.hpp"

using namespace pstop;

namespace {

const double inf = std::numeric_limits<double>::infinity();

std::string problems_dir() { return PSTOP_PROBLEMS_DIR; }

diffusion_spec line_bm() {
  diffusion_spec d;
  d.drift = scalar_function::from_expression("0");
  d.vol = scalar_function::from_expression("1");
  d.domain = {-inf, inf, endpoint_kind::natural, endpoint_kind::natural};
  return d;
}

}  // namespace

TEST_CASE("provably_zero_drift") {
  CHECK(provably_zero(scalar_function::from_expression("0")));
  CHECK_FALSE(provably_zero(scalar_function::from_expression("1")));
  CHECK_FALSE(provably_zero(scalar_function::from_expression("0.05*x")));
}

TEST_CASE("default_anchor_placement") {
  CHECK(default_anchor({0.0, 4.0}) == 2.0);
  CHECK(default_anchor({0.0, inf}) == 1.0);
  CHECK(default_anchor({-inf, 0.0}) == -1.0);
  CHECK(default_anchor({-inf, inf}) == 0.0);
}

TEST_CASE("scale_map_zero_drift_is_identity_shift") {
  scale_map sm(line_bm(), -5.0, 5.0);
  CHECK(sm.zero_drift());
  CHECK(sm.anchor() == 0.0);
  for (double x : {-4.0, -1.3, 0.0, 2.7}) {
    CHECK(sm.s(x) == x);
    CHECK(sm.sprime(x) == 1.0);
    CHECK(sm.x_from_s(x) == x);
  }
}

TEST_CASE("scale_map_gbm_power_law") {
  // drift mu*x, vol sigma*x on (0, inf): s'(x) = (x/c)^(-2mu/sigma^2),
  // anchored at c = 1
  problem_spec dw = load_problem(problems_dir() + "/dw.json");
  scale_map sm(dw.dyn, 0.02, 50.0);
  CHECK_FALSE(sm.zero_drift());
  CHECK(sm.anchor() == 1.0);
  const double k = 2.0 * 0.05 / (0.2 * 0.2);  // 2.5
  for (double x : {0.1, 0.7, 1.0, 3.0, 20.0}) {
    CHECK(sm.sprime(x) == doctest::Approx(std::pow(x, -k)).epsilon(1e-8));
    CHECK(sm.s(x) ==
          doctest::Approx((1.0 - std::pow(x, 1.0 - k)) / (k - 1.0)).epsilon(1e-8));
    CHECK(sm.x_from_s(sm.s(x)) == doctest::Approx(x).epsilon(1e-8));
  }
}

TEST_CASE("scale_map_survives_saturation") {
  // strong positive drift: s(x) = (1 - e^(-2(x-1)))/2 saturates in double
  // precision long before the table's right end; the inverse must still build
  problem_spec p = load_problem(problems_dir() + "/eg2_2.json");
  scale_map sm(p.dyn, 0.05, 60.0);
  CHECK(sm.s(2.0) == doctest::Approx((1.0 - std::exp(-2.0)) / 2.0).epsilon(1e-9));
  CHECK(sm.s(60.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sm.x_from_s(sm.s(1.5)) == doctest::Approx(1.5).epsilon(1e-6));
  // nondecreasing up to interpolation rounding in the saturated zone
  for (double a = 0.1; a < 59.0; a += 3.7)
    CHECK(sm.s(a) <= sm.s(a + 0.5) + 1e-14);
}

TEST_CASE("classify_endpoints_brownian_line") {
  diffusion_spec d = line_bm();
  scale_map sm(d, -5.0, 5.0);
  classification c = classify_endpoints(d, sm);
  CHECK(c.left.kind == endpoint_kind::natural);
  CHECK(c.right.kind == endpoint_kind::natural);
  CHECK_FALSE(c.left.accessible);
  CHECK(c.right.which == 'J');
}

TEST_CASE("classify_endpoints_gbm") {
  // 2mu/sigma^2 = 2.5 > 1: the origin is an entrance boundary, infinity natural
  problem_spec dw = load_problem(problems_dir() + "/dw.json");
  scale_map sm(dw.dyn, 0.02, 50.0);
  classification c = classify_endpoints(dw.dyn, sm);
  CHECK(c.left.kind == endpoint_kind::entrance);
  CHECK_FALSE(c.left.accessible);
  CHECK(c.right.kind == endpoint_kind::natural);
}

TEST_CASE("classify_endpoints_absorbed_bm") {
  problem_spec p = load_problem(problems_dir() + "/psi_half.json");
  scale_map sm(p.dyn, 0.01, 30.0);
  classification c = classify_endpoints(p.dyn, sm);
  CHECK(c.left.kind == endpoint_kind::absorbing);
  CHECK(c.left.accessible);
  CHECK(c.left.which == 'I');
  CHECK(c.right.kind == endpoint_kind::natural);
}

TEST_CASE("kotani_condition") {
  // BM on the line with constant rate: int |y| (beta+theta) dy diverges
  problem_spec p = load_problem(problems_dir() + "/h_phi.json");
  kotani_report r = kotani_check(p, -10.0, 10.0);
  CHECK(r.left == condition_status::holds);
  CHECK(r.right == condition_status::holds);
  CHECK(r.combined() == condition_status::holds);

  // fast-growing volatility makes the integral converge: condition fails
  problem_spec q = p;
  q.dyn.vol = scalar_function::from_expression("1+x^2");
  kotani_report f = kotani_check(q, -10.0, 10.0);
  CHECK(f.combined() == condition_status::fails);

  // non-natural scale is a usage error
  problem_spec drifty = load_problem(problems_dir() + "/eg2_2.json");
  CHECK_THROWS_AS(kotani_check(drifty, 0.1, 30.0), std::invalid_argument);
}

TEST_CASE("time_change_coefficients") {
  problem_spec dw = load_problem(problems_dir() + "/dw.json");
  diffusion_spec y = time_change_coefficients(dw, true);
  for (double x : {0.5, 1.0, 4.0}) {
    CHECK(y.vol(x) == doctest::Approx(0.2 * x / std::sqrt(1.1)));
    CHECK(y.drift(x) == doctest::Approx(0.05 * x / 1.1));
  }

  // declared-infinite rate region: capped uses the numerical cap, exact freezes
  problem_spec barrier = load_problem(problems_dir() + "/eg2_4.json");
  diffusion_spec capped = time_change_coefficients(barrier, true);
  diffusion_spec exact = time_change_coefficients(barrier, false);
  CHECK(capped.vol(0.5) ==
        doctest::Approx(std::sqrt(2.0) * 0.5 / std::sqrt(2.0 + 2e4)));
  CHECK(exact.vol(0.5) == 0.0);
  CHECK(exact.drift(0.5) == 0.0);
  CHECK(exact.vol(2.0) == doctest::Approx(std::sqrt(2.0) * 2.0 / std::sqrt(2.0)));
}

TEST_CASE("to_natural_scale_composition") {
  problem_spec p = load_problem(problems_dir() + "/eg2_2.json");
  scale_map sm(p.dyn, 0.05, 40.0);
  problem_spec q = to_natural_scale(p, sm);

  // payoff and rate compose with the inverse scale
  for (double x : {0.3, 1.0, 2.0, 5.0}) {
    double m = sm.s(x);
    CHECK(q.payoff(m) == doctest::Approx(p.payoff(x)).epsilon(1e-7));
    CHECK(q.rate(m) == doctest::Approx(20.0));
    // eta(m) = (a s') o s^{-1}
    CHECK(q.dyn.vol(m) == doctest::Approx(sm.sprime(x)).epsilon(1e-7));
  }
  const bool driftless = provably_zero(q.dyn.drift) || q.dyn.drift(0.1) == 0.0;
  CHECK(driftless);

  // domain maps through the scale limits: s(0) finite, s(inf) = 1/2
  CHECK(q.dyn.domain.left ==
        doctest::Approx((1.0 - std::exp(2.0)) / 2.0).epsilon(1e-6));
  CHECK(q.dyn.domain.right == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(q.dyn.domain.left_kind == endpoint_kind::absorbing);
}

TEST_CASE("validate_problem_standing_assumptions") {
  problem_spec dw = load_problem(problems_dir() + "/dw.json");
  assumption_report r = validate_problem(dw, 0.02, 50.0);
  CHECK(r.sa1.status == check_status::pass);
  CHECK(r.sa2.status == check_status::pass);
  CHECK(r.sa3.status == check_status::pass);
  CHECK(r.pass());

  problem_spec eg25 = load_problem(problems_dir() + "/eg2_5.json");
  assumption_report f = validate_problem(eg25, 0.01, 40.0);
  CHECK(f.sa3.status == check_status::fail);
  CHECK(f.definite_fail());
  CHECK(f.sa3.detail.find("x=0") != std::string::npos);

  problem_spec eg22 = load_problem(problems_dir() + "/eg2_2.json");
  CHECK(validate_problem(eg22, 0.05, 40.0).pass());
}

TEST_CASE("validation_rate_caps_declared_infinity_only") {
  problem_spec barrier = load_problem(problems_dir() + "/eg2_4.json");
  CHECK(validation_rate(barrier, 0.5) == barrier.rate_cap());
  problem_spec steep = load_problem(problems_dir() + "/eg2_5.json");
  CHECK(validation_rate(steep, 1e-4) == doctest::Approx(1e8));
}
