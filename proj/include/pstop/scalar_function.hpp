#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pstop/expr.hpp"

namespace pstop {

enum class builtin_family { constant, linear, power, call_payoff, indicator_barrier };

// Parameter slots by family:
//   constant:          p0 = value (may be +inf for rates)
//   linear:            p0 = slope, p1 = intercept
//   power:             p0 = coefficient, p1 = exponent
//   call_payoff:       p0 = strike                      -> max(x - K, 0)
//   indicator_barrier: p0 = threshold J, p1 = value for x <= J, p2 = value for
//                      x > J (either value may be +inf for rates)
struct builtin_spec {
  builtin_family family = builtin_family::constant;
  double p0 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
};

// One piece of a piecewise definition, active on the half-open interval
// [lo, hi).  A piece may be the declared constant +inf (rates only), in which
// case `fn` is unused.
struct function_piece {
  double lo = 0.0;
  double hi = 0.0;
  bool infinite_value = false;
  expression fn;
};

// Deterministic scalar function of one real variable.  One of four forms:
// a parsed expression, a piecewise list over half-open intervals (last piece
// closed on the right), a named builtin family, or an in-process callable.
// Callables are used for composed coefficients (time-changed or transformed
// problems); they have no text form and cannot be serialized.
//
// Evaluation policy: NaN is always an error.  +inf is legal only when it comes
// from a declared infinite constant (builtin or piecewise "inf"); an
// expression that merely overflows is a domain error.
class scalar_function {
 public:
  enum class kind { empty, expr, piecewise, builtin, callable };

  scalar_function() = default;

  static scalar_function from_expression(const std::string& text);
  static scalar_function from_pieces(std::vector<function_piece> pieces);
  static scalar_function from_builtin(const builtin_spec& spec);
  static scalar_function from_callable(std::function<double(double)> fn, std::string label);

  double operator()(double x) const;

  kind form() const { return kind_; }
  bool defined() const { return kind_ != kind::empty; }

  // True if some declared piece/level is the constant +inf.
  bool declares_infinity() const;

  // A provable bound on |f| when the function takes finitely many known finite
  // values (constants, finite barrier levels, piecewise constants); nullopt
  // otherwise.
  std::optional<double> provable_bound() const;

  bool can_render() const { return kind_ != kind::callable; }
  // Text form: expression source for expr; a description for the other forms.
  std::string render() const;

  const builtin_spec* builtin() const {
    return kind_ == kind::builtin ? &builtin_ : nullptr;
  }
  const std::vector<function_piece>* pieces() const {
    return kind_ == kind::piecewise ? &pieces_ : nullptr;
  }

 private:
  kind kind_ = kind::empty;
  expression expr_;
  std::vector<function_piece> pieces_;
  builtin_spec builtin_;
  std::function<double(double)> callable_;
  std::string label_;

  double eval_builtin(double x) const;
};

}  // namespace pstop
