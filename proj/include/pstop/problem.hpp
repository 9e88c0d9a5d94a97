#pragma once

#include <string>

#include "pstop/scalar_function.hpp"

#include "json.hpp"

namespace pstop {

enum class endpoint_kind { absorbing, natural, entrance, unclassified };

std::string to_string(endpoint_kind k);
endpoint_kind endpoint_kind_from_string(const std::string& s);

// State interval with declared endpoint behaviour.  Endpoints may be +/-inf;
// an infinite endpoint cannot be absorbing.  The state space includes a finite
// endpoint exactly when it is absorbing.
struct interval_spec {
  double left = -std::numeric_limits<double>::infinity();
  double right = std::numeric_limits<double>::infinity();
  endpoint_kind left_kind = endpoint_kind::unclassified;
  endpoint_kind right_kind = endpoint_kind::unclassified;

  bool left_closed() const {
    return std::isfinite(left) && left_kind == endpoint_kind::absorbing;
  }
  bool right_closed() const {
    return std::isfinite(right) && right_kind == endpoint_kind::absorbing;
  }
  // Membership in the state space (closure at absorbing endpoints only).
  bool contains(double x) const {
    if (x < left || x > right) return false;
    if (x == left && !left_closed()) return false;
    if (x == right && !right_closed()) return false;
    return true;
  }
};

// One-dimensional diffusion dX = b(X)dt + a(X)dW on an interval.
struct diffusion_spec {
  scalar_function drift;  // b
  scalar_function vol;    // a, must be > 0 on the interior
  interval_spec domain;
};

// Optimal stopping problem: payoff g, discount beta, and a state-dependent
// Poisson rate theta restricting the admissible stopping times to event times
// of the theta(X)-modulated Poisson process.
//
// theta = +inf is allowed only as a declared piecewise / barrier level.  For
// numerics a declared-infinite evaluation is replaced by the finite cap
// rate_cap_multiple * beta (design default 1e4); at that size the Poisson
// value is within O(beta/cap) of the theta = inf limit.  Finite rate values
// are never altered, however large: genuine blow-ups such as theta = x^-2
// must reach the discretization unclipped for the accumulating-events
// behaviour to survive.
struct problem_spec {
  diffusion_spec dyn;
  scalar_function payoff;  // g >= 0
  scalar_function rate;    // theta >= 0, possibly +inf on declared regions
  double beta = 0.0;
  double rate_cap_multiple = 1e4;
  std::string name;

  double rate_cap() const { return rate_cap_multiple * beta; }
  // theta with the numerical cap applied; always finite.
  double capped_rate(double x) const;
};

// psi = g*theta/(beta+theta) with the exact limits psi = g at theta = +inf and
// psi = 0 at theta = 0.
double psi_value(double g, double theta, double beta);
// psi using the raw (uncapped) rate.
double psi(const problem_spec& p, double x);
// psi using the capped rate (what the solver discretizes).
double psi_capped(const problem_spec& p, double x);

// JSON schema:
// {
//   "name":   optional string,
//   "beta":   number > 0,
//   "drift":  function, "vol": function, "payoff": function, "rate": function,
//   "interval": {"left": number|"-inf", "right": number|"inf",
//                "left_kind": "absorbing"|"natural"|"entrance"|"unclassified",
//                "right_kind": ...},
//   "rate_cap_multiple": optional number (default 1e4)
// }
// A function is an expression string, a number (constant), or an object with
// either {"builtin": name, ...params} or {"piecewise": [{"from","to","expr"}]}
// where "expr" may be "inf" to declare an infinite rate piece.
problem_spec problem_from_json(const nlohmann::json& j);
nlohmann::json problem_to_json(const problem_spec& p);
problem_spec load_problem(const std::string& path);

scalar_function function_from_json(const nlohmann::json& j);
nlohmann::json function_to_json(const scalar_function& f);

// Extended real: number, or the strings "inf" / "-inf".
double extended_from_json(const nlohmann::json& j);
nlohmann::json extended_to_json(double v);

}  // namespace pstop
