#include "pstop/classify.hpp"

#include <cmath>
#include <stdexcept>

namespace pstop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string to_string(condition_status s) {
  switch (s) {
    case condition_status::holds:
      return "holds";
    case condition_status::fails:
      return "fails";
    case condition_status::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

endpoint_report classify_endpoint(const diffusion_spec& d, const scale_map& sm, bool left_side) {
  endpoint_report out;
  const double e = left_side ? d.domain.left : d.domain.right;
  const int dir = left_side ? -1 : +1;
  out.scale_limit = left_side ? sm.left_limit() : sm.right_limit();

  const double from = sm.anchor();
  auto fresh_tracker = [&]() {
    return scale_tracker(d, from, -std::log(sm.sprime(from)), sm.s(from), dir);
  };

  if (out.scale_limit.status == improper_status::inconclusive) {
    out.detail = "scale limit inconclusive: " + out.scale_limit.detail;
    return out;
  }

  if (out.scale_limit.status == improper_status::converged &&
      std::isfinite(out.scale_limit.value)) {
    // finite natural-scale endpoint: accessibility test
    out.which = 'I';
    const double s_e = out.scale_limit.value;
    auto tr = fresh_tracker();
    out.criterion = integrate_toward(
        [&](double x) {
          double a = d.vol(x);
          return std::fabs(tr.s(x) - s_e) / (tr.sprime(x) * a * a);
        },
        from, e);
    switch (out.criterion.status) {
      case improper_status::converged:
        out.accessible = true;
        out.kind = endpoint_kind::absorbing;
        out.detail = "accessible (I integral finite); absorbing under the standing assumptions";
        break;
      case improper_status::diverged:
        out.kind = endpoint_kind::natural;
        out.detail = "inaccessible (I integral infinite)";
        break;
      case improper_status::inconclusive:
        out.detail = "I integral inconclusive: " + out.criterion.detail;
        break;
    }
    return out;
  }

  // infinite natural-scale endpoint: entrance test
  out.which = 'J';
  auto tr = fresh_tracker();
  out.criterion = integrate_toward(
      [&](double x) {
        double a = d.vol(x);
        return 1.0 / (tr.sprime(x) * a * a);
      },
      from, e);
  switch (out.criterion.status) {
    case improper_status::converged:
      out.kind = endpoint_kind::entrance;
      out.detail = "entrance (J integral finite)";
      break;
    case improper_status::diverged:
      out.kind = endpoint_kind::natural;
      out.detail = "natural (J integral infinite)";
      break;
    case improper_status::inconclusive:
      out.detail = "J integral inconclusive: " + out.criterion.detail;
      break;
  }
  return out;
}

classification classify_endpoints(const diffusion_spec& d, const scale_map& sm) {
  return {classify_endpoint(d, sm, true), classify_endpoint(d, sm, false)};
}

endpoint_report classify_natural_scale(const real_fn& eta, double from, double e) {
  endpoint_report out;
  out.scale_limit.status =
      std::isfinite(e) ? improper_status::converged : improper_status::diverged;
  out.scale_limit.value = std::isfinite(e) ? e : kInf;
  out.scale_limit.detail = "natural scale: s(m) = m";

  if (std::isfinite(e)) {
    out.which = 'I';
    out.criterion = integrate_toward(
        [&](double m) {
          double h = eta(m);
          return std::fabs(m - e) / (h * h);
        },
        from, e);
    if (out.criterion.status == improper_status::converged) {
      out.accessible = true;
      out.kind = endpoint_kind::absorbing;
      out.detail = "accessible (I integral finite)";
    } else if (out.criterion.status == improper_status::diverged) {
      out.kind = endpoint_kind::natural;
      out.detail = "inaccessible (I integral infinite)";
    } else {
      out.detail = "I integral inconclusive: " + out.criterion.detail;
    }
    return out;
  }

  out.which = 'J';
  out.criterion = integrate_toward(
      [&](double m) {
        double h = eta(m);
        return 1.0 / (h * h);
      },
      from, e);
  if (out.criterion.status == improper_status::converged) {
    out.kind = endpoint_kind::entrance;
    out.detail = "entrance (J integral finite)";
  } else if (out.criterion.status == improper_status::diverged) {
    out.kind = endpoint_kind::natural;
    out.detail = "natural (J integral infinite)";
  } else {
    out.detail = "J integral inconclusive: " + out.criterion.detail;
  }
  return out;
}

kotani_report kotani_check(const problem_spec& p, double probe_lo, double probe_hi) {
  if (!provably_zero(p.dyn.drift))
    throw std::invalid_argument(
        "kotani_check requires a natural-scale problem (zero drift); transform first");
  kotani_report out;
  auto integrand = [&p](double y) {
    double a = p.dyn.vol(y);
    return std::fabs(y) * (p.beta + p.capped_rate(y)) / (a * a);
  };
  auto one_side = [&](double from, double e, improper_result& ir) {
    if (std::isfinite(e)) {
      ir.status = improper_status::converged;
      ir.detail = "finite endpoint: condition vacuous";
      return condition_status::holds;
    }
    ir = integrate_toward(integrand, from, e);
    if (ir.status == improper_status::diverged) return condition_status::holds;
    if (ir.status == improper_status::converged) return condition_status::fails;
    return condition_status::inconclusive;
  };
  out.left = one_side(probe_lo, p.dyn.domain.left, out.left_integral);
  out.right = one_side(probe_hi, p.dyn.domain.right, out.right_integral);
  return out;
}

diffusion_spec time_change_coefficients(const problem_spec& p, bool capped) {
  diffusion_spec out;
  const problem_spec* pp = &p;
  auto rate_at = [pp, capped](double x) {
    return capped ? pp->capped_rate(x) : pp->rate(x);
  };
  out.vol = scalar_function::from_callable(
      [pp, rate_at](double x) { return pp->dyn.vol(x) / std::sqrt(pp->beta + rate_at(x)); },
      "a/sqrt(beta+theta) of " + p.name);
  out.drift = scalar_function::from_callable(
      [pp, rate_at](double x) { return pp->dyn.drift(x) / (pp->beta + rate_at(x)); },
      "b/(beta+theta) of " + p.name);
  out.domain = p.dyn.domain;
  // the faster clock can change endpoint behaviour; only absorption is a
  // structural property that survives the time change
  if (out.domain.left_kind != endpoint_kind::absorbing)
    out.domain.left_kind = endpoint_kind::unclassified;
  if (out.domain.right_kind != endpoint_kind::absorbing)
    out.domain.right_kind = endpoint_kind::unclassified;
  return out;
}

problem_spec to_natural_scale(const problem_spec& p, const scale_map& sm) {
  auto limit_value = [](const improper_result& r, double sign) {
    if (r.status == improper_status::converged) return r.value;
    if (r.status == improper_status::diverged) return sign * kInf;
    throw std::runtime_error("scale limit inconclusive; cannot map the domain");
  };
  problem_spec out;
  out.beta = p.beta;
  out.rate_cap_multiple = p.rate_cap_multiple;
  out.name = p.name.empty() ? "natural_scale" : p.name + "_natural_scale";

  const problem_spec* pp = &p;
  const scale_map* smp = &sm;
  out.dyn.drift = scalar_function::from_expression("0");
  out.dyn.vol = scalar_function::from_callable(
      [pp, smp](double m) {
        double x = smp->x_from_s(m);
        return pp->dyn.vol(x) * smp->sprime(x);
      },
      "eta of " + p.name);
  out.payoff = scalar_function::from_callable(
      [pp, smp](double m) { return pp->payoff(smp->x_from_s(m)); }, "payoff of " + p.name);
  out.rate = scalar_function::from_callable(
      [pp, smp](double m) { return pp->rate(smp->x_from_s(m)); }, "rate of " + p.name);

  out.dyn.domain.left = limit_value(sm.left_limit(), -1.0);
  out.dyn.domain.right = limit_value(sm.right_limit(), +1.0);
  out.dyn.domain.left_kind = p.dyn.domain.left_kind;
  out.dyn.domain.right_kind = p.dyn.domain.right_kind;
  return out;
}

}  // namespace pstop
