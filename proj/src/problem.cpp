#include "pstop/problem.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace pstop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument(msg); }
}  // namespace

std::string to_string(endpoint_kind k) {
  switch (k) {
    case endpoint_kind::absorbing:
      return "absorbing";
    case endpoint_kind::natural:
      return "natural";
    case endpoint_kind::entrance:
      return "entrance";
    case endpoint_kind::unclassified:
      return "unclassified";
  }
  return "unclassified";
}

endpoint_kind endpoint_kind_from_string(const std::string& s) {
  if (s == "absorbing") return endpoint_kind::absorbing;
  if (s == "natural") return endpoint_kind::natural;
  if (s == "entrance") return endpoint_kind::entrance;
  if (s == "unclassified") return endpoint_kind::unclassified;
  bad("unknown endpoint kind '" + s + "'");
}

double problem_spec::capped_rate(double x) const {
  double t = rate(x);
  if (t < 0) throw eval_error("rate is negative at x=" + format_double(x));
  return std::isinf(t) ? rate_cap() : t;
}

double psi_value(double g, double theta, double beta) {
  if (std::isinf(theta)) return g;
  if (theta == 0.0) return 0.0;
  return g * theta / (beta + theta);
}

double psi(const problem_spec& p, double x) { return psi_value(p.payoff(x), p.rate(x), p.beta); }

double psi_capped(const problem_spec& p, double x) {
  return psi_value(p.payoff(x), p.capped_rate(x), p.beta);
}

double extended_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    bad("expected a number or \"inf\"/\"-inf\", got \"" + s + "\"");
  }
  bad("expected a number or \"inf\"/\"-inf\"");
}

nlohmann::json extended_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

namespace {

scalar_function builtin_from_json(const nlohmann::json& j) {
  std::string name = j.at("builtin").get<std::string>();
  builtin_spec spec;
  if (name == "constant") {
    spec.family = builtin_family::constant;
    spec.p0 = extended_from_json(j.at("value"));
    if (spec.p0 == -kInf) bad("builtin constant cannot be -inf");
  } else if (name == "linear") {
    spec.family = builtin_family::linear;
    spec.p0 = j.at("slope").get<double>();
    spec.p1 = j.at("intercept").get<double>();
  } else if (name == "power") {
    spec.family = builtin_family::power;
    spec.p0 = j.at("coefficient").get<double>();
    spec.p1 = j.at("exponent").get<double>();
  } else if (name == "call-payoff") {
    spec.family = builtin_family::call_payoff;
    spec.p0 = j.contains("K") ? j.at("K").get<double>() : j.at("strike").get<double>();
  } else if (name == "indicator-barrier") {
    spec.family = builtin_family::indicator_barrier;
    spec.p0 = j.contains("J") ? j.at("J").get<double>() : j.at("threshold").get<double>();
    spec.p1 = extended_from_json(j.at("low"));
    spec.p2 = extended_from_json(j.at("high"));
    if (spec.p1 == -kInf || spec.p2 == -kInf) bad("indicator-barrier level cannot be -inf");
  } else {
    bad("unknown builtin family '" + name + "'");
  }
  return scalar_function::from_builtin(spec);
}

scalar_function piecewise_from_json(const nlohmann::json& j) {
  std::vector<function_piece> pieces;
  for (const auto& pj : j.at("piecewise")) {
    function_piece p;
    p.lo = extended_from_json(pj.at("from"));
    p.hi = extended_from_json(pj.at("to"));
    const auto& e = pj.at("expr");
    if (e.is_number()) {
      p.fn = expression::parse(format_double(e.get<double>()));
    } else {
      std::string s = e.get<std::string>();
      if (s == "inf" || s == "+inf")
        p.infinite_value = true;
      else
        p.fn = expression::parse(s);
    }
    pieces.push_back(std::move(p));
  }
  return scalar_function::from_pieces(std::move(pieces));
}

}  // namespace

scalar_function function_from_json(const nlohmann::json& j) {
  if (j.is_string()) return scalar_function::from_expression(j.get<std::string>());
  if (j.is_number()) return scalar_function::from_expression(format_double(j.get<double>()));
  if (j.is_object()) {
    if (j.contains("builtin")) return builtin_from_json(j);
    if (j.contains("piecewise")) return piecewise_from_json(j);
    bad("function object must contain \"builtin\" or \"piecewise\"");
  }
  bad("function must be a string, number, or object");
}

nlohmann::json function_to_json(const scalar_function& f) {
  using nlohmann::json;
  switch (f.form()) {
    case scalar_function::kind::expr:
      return f.render();
    case scalar_function::kind::builtin: {
      const builtin_spec& b = *f.builtin();
      json j;
      switch (b.family) {
        case builtin_family::constant:
          j = {{"builtin", "constant"}, {"value", extended_to_json(b.p0)}};
          break;
        case builtin_family::linear:
          j = {{"builtin", "linear"}, {"slope", b.p0}, {"intercept", b.p1}};
          break;
        case builtin_family::power:
          j = {{"builtin", "power"}, {"coefficient", b.p0}, {"exponent", b.p1}};
          break;
        case builtin_family::call_payoff:
          j = {{"builtin", "call-payoff"}, {"K", b.p0}};
          break;
        case builtin_family::indicator_barrier:
          j = {{"builtin", "indicator-barrier"},
               {"J", b.p0},
               {"low", extended_to_json(b.p1)},
               {"high", extended_to_json(b.p2)}};
          break;
      }
      return j;
    }
    case scalar_function::kind::piecewise: {
      json arr = json::array();
      for (const auto& p : *f.pieces()) {
        json pj;
        pj["from"] = extended_to_json(p.lo);
        pj["to"] = extended_to_json(p.hi);
        pj["expr"] = p.infinite_value ? json("inf") : json(p.fn.render());
        arr.push_back(pj);
      }
      return json{{"piecewise", arr}};
    }
    default:
      bad("cannot serialize an in-process callable");
  }
}

problem_spec problem_from_json(const nlohmann::json& j) {
  problem_spec p;
  if (j.contains("name")) p.name = j.at("name").get<std::string>();
  p.beta = j.at("beta").get<double>();
  if (!(p.beta > 0) || !std::isfinite(p.beta)) bad("beta must be a finite positive number");
  p.dyn.drift = function_from_json(j.at("drift"));
  p.dyn.vol = function_from_json(j.at("vol"));
  p.payoff = function_from_json(j.at("payoff"));
  p.rate = function_from_json(j.at("rate"));
  if (j.contains("rate_cap_multiple")) {
    p.rate_cap_multiple = j.at("rate_cap_multiple").get<double>();
    if (!(p.rate_cap_multiple > 0)) bad("rate_cap_multiple must be positive");
  }

  const auto& iv = j.at("interval");
  p.dyn.domain.left = extended_from_json(iv.at("left"));
  p.dyn.domain.right = extended_from_json(iv.at("right"));
  if (!(p.dyn.domain.left < p.dyn.domain.right)) bad("interval must satisfy left < right");
  if (iv.contains("left_kind"))
    p.dyn.domain.left_kind = endpoint_kind_from_string(iv.at("left_kind").get<std::string>());
  if (iv.contains("right_kind"))
    p.dyn.domain.right_kind = endpoint_kind_from_string(iv.at("right_kind").get<std::string>());
  if (std::isinf(p.dyn.domain.left) && p.dyn.domain.left_kind == endpoint_kind::absorbing)
    bad("an infinite endpoint cannot be absorbing");
  if (std::isinf(p.dyn.domain.right) && p.dyn.domain.right_kind == endpoint_kind::absorbing)
    bad("an infinite endpoint cannot be absorbing");

  if (p.payoff.declares_infinity()) bad("payoff must be finite");
  return p;
}

nlohmann::json problem_to_json(const problem_spec& p) {
  nlohmann::json j;
  if (!p.name.empty()) j["name"] = p.name;
  j["beta"] = p.beta;
  j["drift"] = function_to_json(p.dyn.drift);
  j["vol"] = function_to_json(p.dyn.vol);
  j["payoff"] = function_to_json(p.payoff);
  j["rate"] = function_to_json(p.rate);
  j["interval"] = {{"left", extended_to_json(p.dyn.domain.left)},
                   {"right", extended_to_json(p.dyn.domain.right)},
                   {"left_kind", to_string(p.dyn.domain.left_kind)},
                   {"right_kind", to_string(p.dyn.domain.right_kind)}};
  if (p.rate_cap_multiple != 1e4) j["rate_cap_multiple"] = p.rate_cap_multiple;
  return j;
}

problem_spec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("invalid JSON in " + path + ": " + e.what());
  }
  try {
    problem_spec p = problem_from_json(j);
    if (p.name.empty()) {
      auto slash = path.find_last_of('/');
      std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
      auto dot = base.find_last_of('.');
      p.name = dot == std::string::npos ? base : base.substr(0, dot);
    }
    return p;
  } catch (const std::exception& e) {
    throw std::runtime_error("invalid problem in " + path + ": " + e.what());
  }
}

}  // namespace pstop
