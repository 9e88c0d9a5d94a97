#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "pstop/expr.hpp"
#include "pstop/scalar_function.hpp"

using namespace pstop;

TEST_CASE("arithmetic_and_precedence") {
  CHECK(expression::parse("1+2*3")(0.0) == 7.0);
  CHECK(expression::parse("(1+2)*3")(0.0) == 9.0);
  CHECK(expression::parse("2*x+1")(3.0) == 7.0);
  CHECK(expression::parse("1-2-3")(0.0) == -4.0);        // left associative
  CHECK(expression::parse("12/4/3")(0.0) == 1.0);
  CHECK(expression::parse("2^3^2")(0.0) == 512.0);       // right associative
  CHECK(expression::parse("-x^2")(3.0) == -9.0);         // -(x^2)
  CHECK(expression::parse("(-x)^2")(3.0) == 9.0);
  CHECK(expression::parse("2^-1")(0.0) == 0.5);
  CHECK(expression::parse("x^(-2)")(2.0) == 0.25);
}

TEST_CASE("functions") {
  CHECK(expression::parse("exp(0)")(0.0) == 1.0);
  CHECK(expression::parse("log(exp(2))")(0.0) == doctest::Approx(2.0));
  CHECK(expression::parse("sqrt(x)")(9.0) == 3.0);
  CHECK(expression::parse("abs(-3+x)")(1.0) == 2.0);
  CHECK(expression::parse("sinh(x)")(0.7) == doctest::Approx(std::sinh(0.7)));
  CHECK(expression::parse("cosh(x)")(0.7) == doctest::Approx(std::cosh(0.7)));
  CHECK(expression::parse("min(x,2)")(5.0) == 2.0);
  CHECK(expression::parse("max(x-1,0)")(0.5) == 0.0);
  CHECK(expression::parse("max(x-1,0)")(1.5) == 0.5);
}

TEST_CASE("parse_errors_carry_position") {
  CHECK_THROWS_AS(expression::parse("2*"), parse_error);
  CHECK_THROWS_AS(expression::parse("foo(x)"), parse_error);
  CHECK_THROWS_AS(expression::parse("(1+2"), parse_error);
  CHECK_THROWS_AS(expression::parse(""), parse_error);
  CHECK_THROWS_AS(expression::parse("min(x)"), parse_error);
  try {
    expression::parse("1+@");
  } catch (const parse_error& e) {
    CHECK(e.position() == 2);
  }
}

TEST_CASE("eval_policy_nan_throws_inf_passes") {
  CHECK_THROWS_AS(expression::parse("sqrt(x)")(-1.0), eval_error);
  CHECK_THROWS_AS(expression::parse("log(x)")(-1.0), eval_error);
  CHECK_THROWS_AS(expression::parse("0/0")(0.0), eval_error);
  CHECK(std::isinf(expression::parse("1/x")(0.0)));
  CHECK(std::isinf(expression::parse("exp(x)")(1000.0)));
  CHECK(std::isnan(expression::parse("sqrt(x)").eval_raw(-1.0)));
}

TEST_CASE("render_reparse_is_bit_identical") {
  const char* sources[] = {
      "1+2*3",    "2*x+1",       "-x^2",          "x^(-2)",
      "2^3^2",    "1-2-3",       "max(x-1,0)",    "0.1/(1+2*x)",
      "sqrt(2)*x", "abs(x)+1.15*((abs(1-x)+abs(1+x))/2-abs(x))",
  };
  for (const char* src : sources) {
    expression e = expression::parse(src);
    expression r = expression::parse(e.render());
    for (double x : {-2.0, -0.5, 0.0, 0.3, 1.0, 7.0}) {
      double a = e.eval_raw(x), b = r.eval_raw(x);
      CHECK((a == b || (std::isnan(a) && std::isnan(b))));
    }
  }
}

TEST_CASE("constant_detection") {
  CHECK(expression::parse("3.5").is_constant());
  CHECK(expression::parse("3.5").constant_value() == 3.5);
  CHECK_FALSE(expression::parse("x").is_constant());
  CHECK_FALSE(expression::parse("1+2").is_constant());
}

TEST_CASE("format_double_round_trips") {
  for (double v : {0.0, 1.0, -1.5, 0.1, 1e-300, 1.0 / 3.0, 2.249098000310689762962,
                   std::numeric_limits<double>::denorm_min()}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(-2.0) == "-2");
}

TEST_CASE("builtin_call_payoff") {
  auto f = scalar_function::from_builtin({builtin_family::call_payoff, 1.0});
  CHECK(f(0.5) == 0.0);
  CHECK(f(1.0) == 0.0);
  CHECK(f(1.7) == doctest::Approx(0.7));
  CHECK_FALSE(f.declares_infinity());
  CHECK_FALSE(f.provable_bound().has_value());
}

TEST_CASE("builtin_indicator_barrier") {
  const double inf = std::numeric_limits<double>::infinity();
  auto f = scalar_function::from_builtin({builtin_family::indicator_barrier, 1.0, inf, 0.0});
  CHECK(std::isinf(f(0.5)));
  CHECK(std::isinf(f(1.0)));  // boundary belongs to the low side
  CHECK(f(1.5) == 0.0);
  CHECK(f.declares_infinity());
  CHECK_FALSE(f.provable_bound().has_value());

  auto b = scalar_function::from_builtin({builtin_family::indicator_barrier, 0.0, 1.0, 0.0});
  CHECK(b(0.0) == 1.0);
  CHECK(b(2.0) == 0.0);
  CHECK(b.provable_bound().value() == 1.0);
}

TEST_CASE("piecewise_half_open_intervals") {
  std::vector<function_piece> pieces(2);
  pieces[0].lo = 0.0;
  pieces[0].hi = 1.0;
  pieces[0].fn = expression::parse("1");
  pieces[1].lo = 1.0;
  pieces[1].hi = 2.0;
  pieces[1].fn = expression::parse("x+10");
  auto f = scalar_function::from_pieces(std::move(pieces));
  CHECK(f(0.0) == 1.0);
  CHECK(f(0.999) == 1.0);
  CHECK(f(1.0) == 11.0);  // second piece active on [1, 2]
  CHECK(f(1.5) == 11.5);
  CHECK(f(2.0) == 12.0);  // last piece closed on the right
  CHECK(f.provable_bound().has_value() == false);
}

TEST_CASE("expression_overflow_is_domain_error") {
  auto f = scalar_function::from_expression("exp(x)");
  CHECK_THROWS_AS(f(1000.0), eval_error);  // overflow, not a declared infinity
  auto g = scalar_function::from_expression("x^(-2)");
  CHECK(g(2.0) == 0.25);
  CHECK_THROWS_AS(g(0.0), eval_error);
}

TEST_CASE("callable_round_trip") {
  auto f = scalar_function::from_callable([](double x) { return 2.0 * x; }, "twice");
  CHECK(f(3.0) == 6.0);
  CHECK_FALSE(f.can_render());
}
