#pragma once

#include <string>
#include <vector>

#include "pstop/grid.hpp"
#include "pstop/scalar_function.hpp"

namespace pstop {

// Continuation beyond the truncation bounds: hold the edge value, extend the
// edge segment linearly (floored at 0), or follow a declared power tail
// v_edge * (x / x_edge)^exponent.
enum class tail_rule { hold, linear, power };

// Node values on a grid with piecewise-linear interpolation in between.
struct value_function {
  grid g;
  std::vector<double> v;
  tail_rule left_tail = tail_rule::hold;
  tail_rule right_tail = tail_rule::hold;
  double left_exponent = 0.0;
  double right_exponent = 0.0;

  double operator()(double x) const;

  static value_function zero(const grid& g);
  static value_function from_values(const grid& g, std::vector<double> values);
  template <class F>
  static value_function sample(const grid& g, F&& f) {
    std::vector<double> values;
    values.reserve(g.size());
    for (double x : g.nodes) values.push_back(f(x));
    return from_values(g, std::move(values));
  }

  double sup_norm() const;
  // max_i |v_i - o.v_i| for a value function on the same grid.
  double sup_distance(const value_function& o) const;
};

}  // namespace pstop
