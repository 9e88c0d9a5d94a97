#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pstop {

// Error raised while parsing expression text. `position` is a 0-based byte
// offset into the source string.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& message, std::size_t position)
      : std::runtime_error(message + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Error raised when a function evaluation leaves its domain (NaN result, or an
// infinity where a finite value is required).
class eval_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arithmetic expression in one variable `x`.
//
// Grammar (small by design):
//   expr   := term  (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := primary ('^' unary)?            -- right associative
//   primary:= number | 'x' | name '(' expr (',' expr)? ')' | '(' expr ')'
//
// Unary functions: exp, log, sqrt, abs, sinh, cosh.  Binary: min, max.
// `-x^2` parses as `-(x^2)`.
class expression {
 public:
  expression() = default;

  static expression parse(const std::string& text);

  // Plain IEEE arithmetic; may return NaN or +/-inf.
  double eval_raw(double x) const;

  // Throws eval_error on a NaN result (domain error); infinities pass through
  // so callers can apply their own finiteness policy.
  double operator()(double x) const;

  // Parseable text; re-parsing yields the same tree and hence bit-identical
  // evaluation at every point.
  std::string render() const;

  bool empty() const { return root_ < 0; }

  // True when the expression is a single numeric literal (used to prove
  // boundedness of piecewise-constant functions).
  bool is_constant() const;
  double constant_value() const;

 private:
  enum class op : std::uint8_t {
    constant,
    variable,
    add,
    sub,
    mul,
    div,
    pow_bin,
    neg,
    fn_exp,
    fn_log,
    fn_sqrt,
    fn_abs,
    fn_sinh,
    fn_cosh,
    fn_min,
    fn_max,
  };
  struct node {
    op kind;
    double value = 0.0;
    int lhs = -1;
    int rhs = -1;
  };

  std::vector<node> nodes_;
  int root_ = -1;

  friend class expr_parser;
  double eval_node(int idx, double x) const;
  void render_node(int idx, std::string& out) const;
  static int precedence(op kind);
};

// Shortest decimal text that strtod maps back to exactly `v`.
std::string format_double(double v);

}  // namespace pstop
