#include "pstop/scalar_function.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pstop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double checked(double v, const char* what, double x) {
  if (std::isnan(v) || std::isinf(v))
    throw eval_error(std::string("non-finite value from ") + what + " at x=" + format_double(x));
  return v;
}
}  // namespace

scalar_function scalar_function::from_expression(const std::string& text) {
  scalar_function f;
  f.kind_ = kind::expr;
  f.expr_ = expression::parse(text);
  return f;
}

scalar_function scalar_function::from_pieces(std::vector<function_piece> pieces) {
  if (pieces.empty()) throw std::invalid_argument("piecewise function needs at least one piece");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!(pieces[i].lo < pieces[i].hi))
      throw std::invalid_argument("piecewise piece has empty interval");
    if (i + 1 < pieces.size() && pieces[i].hi != pieces[i + 1].lo)
      throw std::invalid_argument("piecewise pieces must tile contiguously");
  }
  scalar_function f;
  f.kind_ = kind::piecewise;
  f.pieces_ = std::move(pieces);
  return f;
}

scalar_function scalar_function::from_builtin(const builtin_spec& spec) {
  scalar_function f;
  f.kind_ = kind::builtin;
  f.builtin_ = spec;
  return f;
}

scalar_function scalar_function::from_callable(std::function<double(double)> fn,
                                               std::string label) {
  scalar_function f;
  f.kind_ = kind::callable;
  f.callable_ = std::move(fn);
  f.label_ = std::move(label);
  return f;
}

double scalar_function::eval_builtin(double x) const {
  switch (builtin_.family) {
    case builtin_family::constant:
      return builtin_.p0;
    case builtin_family::linear:
      return checked(builtin_.p0 * x + builtin_.p1, "linear builtin", x);
    case builtin_family::power:
      return checked(builtin_.p0 * std::pow(x, builtin_.p1), "power builtin", x);
    case builtin_family::call_payoff:
      return std::fmax(x - builtin_.p0, 0.0);
    case builtin_family::indicator_barrier:
      return x <= builtin_.p0 ? builtin_.p1 : builtin_.p2;
  }
  return 0.0;
}

double scalar_function::operator()(double x) const {
  switch (kind_) {
    case kind::empty:
      throw eval_error("evaluating undefined function");
    case kind::expr: {
      double v = expr_(x);
      if (std::isinf(v))
        throw eval_error("expression '" + expr_.render() +
                         "' is non-finite at x=" + format_double(x));
      return v;
    }
    case kind::piecewise: {
      const function_piece* hit = nullptr;
      for (const auto& p : pieces_) {
        bool last = &p == &pieces_.back();
        if (x >= p.lo && (x < p.hi || (last && x <= p.hi))) {
          hit = &p;
          break;
        }
      }
      if (!hit)
        throw eval_error("x=" + format_double(x) + " outside piecewise definition range");
      if (hit->infinite_value) return kInf;
      double v = hit->fn(x);
      if (std::isinf(v))
        throw eval_error("piecewise expression non-finite at x=" + format_double(x));
      return v;
    }
    case kind::builtin:
      return eval_builtin(x);
    case kind::callable: {
      double v = callable_(x);
      if (std::isnan(v)) throw eval_error("callable '" + label_ + "' returned NaN");
      return v;
    }
  }
  return 0.0;
}

bool scalar_function::declares_infinity() const {
  switch (kind_) {
    case kind::builtin:
      if (builtin_.family == builtin_family::constant) return std::isinf(builtin_.p0);
      if (builtin_.family == builtin_family::indicator_barrier)
        return std::isinf(builtin_.p1) || std::isinf(builtin_.p2);
      return false;
    case kind::piecewise:
      for (const auto& p : pieces_)
        if (p.infinite_value) return true;
      return false;
    default:
      return false;
  }
}

std::optional<double> scalar_function::provable_bound() const {
  switch (kind_) {
    case kind::expr:
      if (expr_.is_constant()) return std::fabs(expr_.constant_value());
      return std::nullopt;
    case kind::builtin:
      if (builtin_.family == builtin_family::constant && std::isfinite(builtin_.p0))
        return std::fabs(builtin_.p0);
      if (builtin_.family == builtin_family::indicator_barrier && std::isfinite(builtin_.p1) &&
          std::isfinite(builtin_.p2))
        return std::fmax(std::fabs(builtin_.p1), std::fabs(builtin_.p2));
      return std::nullopt;
    case kind::piecewise: {
      double bound = 0.0;
      for (const auto& p : pieces_) {
        if (p.infinite_value || !p.fn.is_constant()) return std::nullopt;
        bound = std::fmax(bound, std::fabs(p.fn.constant_value()));
      }
      return bound;
    }
    default:
      return std::nullopt;
  }
}

std::string scalar_function::render() const {
  switch (kind_) {
    case kind::empty:
      return "<undefined>";
    case kind::expr:
      return expr_.render();
    case kind::piecewise: {
      std::string out = "piecewise{";
      for (const auto& p : pieces_) {
        out += "[" + format_double(p.lo) + "," + format_double(p.hi) + "): ";
        out += p.infinite_value ? "inf" : p.fn.render();
        out += "; ";
      }
      out += "}";
      return out;
    }
    case kind::builtin: {
      switch (builtin_.family) {
        case builtin_family::constant:
          return "constant(" + format_double(builtin_.p0) + ")";
        case builtin_family::linear:
          return "linear(slope=" + format_double(builtin_.p0) +
                 ",intercept=" + format_double(builtin_.p1) + ")";
        case builtin_family::power:
          return "power(coefficient=" + format_double(builtin_.p0) +
                 ",exponent=" + format_double(builtin_.p1) + ")";
        case builtin_family::call_payoff:
          return "call-payoff(K=" + format_double(builtin_.p0) + ")";
        case builtin_family::indicator_barrier:
          return "indicator-barrier(J=" + format_double(builtin_.p0) +
                 ",low=" + format_double(builtin_.p1) + ",high=" + format_double(builtin_.p2) +
                 ")";
      }
      return "builtin";
    }
    case kind::callable:
      return "<callable:" + label_ + ">";
  }
  return "";
}

}  // namespace pstop
