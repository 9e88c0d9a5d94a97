#include "pstop/value_function.hpp"

#include <cmath>
#include <stdexcept>

namespace pstop {

double value_function::operator()(double x) const {
  const std::vector<double>& xs = g.nodes;
  if (x <= xs.front()) {
    if (x == xs.front() || left_tail == tail_rule::hold) return v.front();
    if (left_tail == tail_rule::power)
      return v.front() * std::pow(x / xs.front(), left_exponent);
    const double slope = (v[1] - v[0]) / (xs[1] - xs[0]);
    return std::max(0.0, v.front() + slope * (x - xs.front()));
  }
  if (x >= xs.back()) {
    if (x == xs.back() || right_tail == tail_rule::hold) return v.back();
    if (right_tail == tail_rule::power)
      return v.back() * std::pow(x / xs.back(), right_exponent);
    const std::size_t n = xs.size();
    const double slope = (v[n - 1] - v[n - 2]) / (xs[n - 1] - xs[n - 2]);
    return std::max(0.0, v.back() + slope * (x - xs.back()));
  }
  const std::size_t i = g.segment(0, x);
  const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return v[i] + t * (v[i + 1] - v[i]);
}

value_function value_function::zero(const grid& g) {
  return from_values(g, std::vector<double>(g.size(), 0.0));
}

value_function value_function::from_values(const grid& g,
                                           std::vector<double> values) {
  check_grid(g);
  if (values.size() != g.size())
    throw std::invalid_argument("value_function: one value per node required");
  for (double y : values)
    if (!std::isfinite(y))
      throw std::invalid_argument("value_function: values must be finite");
  value_function f;
  f.g = g;
  f.v = std::move(values);
  return f;
}

double value_function::sup_norm() const {
  double m = 0.0;
  for (double y : v) m = std::max(m, std::abs(y));
  return m;
}

double value_function::sup_distance(const value_function& o) const {
  if (o.v.size() != v.size())
    throw std::invalid_argument("sup_distance: value functions on different grids");
  double m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    m = std::max(m, std::abs(v[i] - o.v[i]));
  return m;
}

}  // namespace pstop
