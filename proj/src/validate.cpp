#include "pstop/validate.hpp"

#include <cmath>
#include <sstream>

namespace pstop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string at(double x) { return " at x=" + format_double(x); }

// local integrability of `f` on the compact [lo, hi]: adaptive quadrature
// either converges, or pins a non-integrable point
check_status compact_integrable(const real_fn& f, double lo, double hi, std::string& detail,
                                const std::string& label) {
  quad_result q = integrate(f, lo, hi, 1e-10, 1e-8);
  if (!std::isnan(q.bad_point)) {
    detail = label + " not integrable near x=" + format_double(q.bad_point);
    return check_status::fail;
  }
  if (!std::isfinite(q.value)) {
    detail = label + " integral overflowed on [" + format_double(lo) + "," +
             format_double(hi) + "]";
    return check_status::fail;
  }
  return check_status::pass;
}

check_status endpoint_integrable(const real_fn& f, double from, double e, std::string& detail,
                                 const std::string& label) {
  improper_result r = integrate_toward(f, from, e);
  switch (r.status) {
    case improper_status::converged:
      return check_status::pass;
    case improper_status::diverged:
      detail = label + " diverges toward x=" + format_double(e) + " (" + r.detail + ")";
      return check_status::fail;
    case improper_status::inconclusive:
      detail = label + " inconclusive toward x=" + format_double(e) + " (" + r.detail + ")";
      return check_status::inconclusive;
  }
  return check_status::inconclusive;
}

void merge(assumption_check& c, check_status s, const std::string& detail) {
  if (s == check_status::pass) return;
  if (s == check_status::fail) {
    c.status = check_status::fail;
    if (!c.detail.empty()) c.detail += "; ";
    c.detail += detail;
    return;
  }
  if (c.status != check_status::fail) {
    c.status = check_status::inconclusive;
    if (!c.detail.empty()) c.detail += "; ";
    c.detail += detail;
  }
}

}  // namespace

std::string to_string(check_status s) {
  switch (s) {
    case check_status::pass:
      return "pass";
    case check_status::fail:
      return "fail";
    case check_status::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

double validation_rate(const problem_spec& p, double x) {
  double t = p.rate(x);
  if (t < 0) throw eval_error("rate is negative" + at(x));
  return std::isinf(t) ? p.rate_cap() : t;
}

std::string assumption_report::summary() const {
  std::ostringstream os;
  os << "SA1 " << to_string(sa1.status);
  if (!sa1.detail.empty()) os << " (" << sa1.detail << ")";
  os << "; SA2 " << to_string(sa2.status);
  if (!sa2.detail.empty()) os << " (" << sa2.detail << ")";
  os << "; SA3 " << to_string(sa3.status);
  if (!sa3.detail.empty()) os << " (" << sa3.detail << ")";
  return os.str();
}

assumption_report validate_problem(const problem_spec& p, double probe_lo, double probe_hi) {
  assumption_report rep;
  rep.sa1.status = rep.sa2.status = rep.sa3.status = check_status::pass;
  const diffusion_spec& d = p.dyn;
  const interval_spec& iv = d.domain;

  // --- SA1: coefficients and payoff -------------------------------------
  const int n_probe = 257;
  for (int i = 0; i < n_probe; ++i) {
    double t = static_cast<double>(i) / (n_probe - 1);
    double x = probe_lo > 0 && probe_hi / probe_lo >= 100.0
                   ? probe_lo * std::pow(probe_hi / probe_lo, t)
                   : probe_lo + (probe_hi - probe_lo) * t;
    try {
      double a = d.vol(x);
      if (!(a > 0)) {
        merge(rep.sa1, check_status::fail, "vol not strictly positive" + at(x));
        break;
      }
      (void)d.drift(x);
      double g = p.payoff(x);
      if (g < 0) {
        merge(rep.sa1, check_status::fail, "payoff negative" + at(x));
        break;
      }
      (void)validation_rate(p, x);
    } catch (const eval_error& e) {
      merge(rep.sa1, check_status::fail, e.what());
      break;
    }
  }

  auto inv_a2 = [&d](double x) {
    double a = d.vol(x);
    return 1.0 / (a * a);
  };
  auto b_over_a2 = [&d](double x) {
    double a = d.vol(x);
    return std::fabs(d.drift(x)) / (a * a);
  };
  std::string detail;
  if (rep.sa1.status == check_status::pass) {
    merge(rep.sa1, compact_integrable(inv_a2, probe_lo, probe_hi, detail, "1/a^2"), detail);
    merge(rep.sa1, compact_integrable(b_over_a2, probe_lo, probe_hi, detail, "b/a^2"), detail);
    if (iv.left_closed()) {
      merge(rep.sa1, endpoint_integrable(inv_a2, probe_lo, iv.left, detail, "1/a^2"), detail);
      merge(rep.sa1, endpoint_integrable(b_over_a2, probe_lo, iv.left, detail, "b/a^2"), detail);
    }
    if (iv.right_closed()) {
      merge(rep.sa1, endpoint_integrable(inv_a2, probe_hi, iv.right, detail, "1/a^2"), detail);
      merge(rep.sa1, endpoint_integrable(b_over_a2, probe_hi, iv.right, detail, "b/a^2"), detail);
    }
  }

  // --- SA2: endpoint behaviour -------------------------------------------
  scale_map sm(d, probe_lo, probe_hi);
  rep.endpoints = classify_endpoints(d, sm);
  auto check_side = [&](const endpoint_report& er, endpoint_kind declared, double e,
                        const char* side) {
    std::string where = std::string(side) + " endpoint " + format_double(e);
    if (er.kind == endpoint_kind::unclassified) {
      merge(rep.sa2, check_status::inconclusive, where + " unclassified: " + er.detail);
      return;
    }
    if (er.accessible) {
      if (std::isinf(e)) {
        merge(rep.sa2, check_status::fail, where + " accessible (explosion)");
      } else if (declared != endpoint_kind::absorbing) {
        merge(rep.sa2, check_status::fail,
              where + " is attainable but declared " + to_string(declared) +
                  "; attainable endpoints must be absorbing");
      }
      return;
    }
    // inaccessible (natural or entrance): fine regardless of declaration;
    // note a declared absorption that can never trigger
    if (declared == endpoint_kind::absorbing) {
      if (rep.sa2.detail.empty())
        rep.sa2.detail = where + " declared absorbing but computed " + to_string(er.kind) +
                         "; absorption never triggers";
    }
  };
  check_side(rep.endpoints.left, iv.left_kind, iv.left, "left");
  check_side(rep.endpoints.right, iv.right_kind, iv.right, "right");

  // --- SA3: rate integrability --------------------------------------------
  auto theta_over_a2 = [&p, &d](double x) {
    double a = d.vol(x);
    return validation_rate(p, x) / (a * a);
  };
  merge(rep.sa3, compact_integrable(theta_over_a2, probe_lo, probe_hi, detail, "theta/a^2"),
        detail);

  auto sa3_endpoint = [&](double from, double e, int dir) {
    // raw theta keeps genuine blow-ups visible to the quadrature
    try {
      double te = p.rate(e);
      if (std::isinf(te)) {
        merge(rep.sa3, check_status::fail,
              "theta must be finite at attainable endpoint x=" + format_double(e));
        return;
      }
    } catch (const eval_error& err) {
      merge(rep.sa3, check_status::fail, err.what());
      return;
    }
    scale_tracker tr(d, from, -std::log(sm.sprime(from)), sm.s(from), dir);
    double s_e;
    const improper_result& lim = dir < 0 ? sm.left_limit() : sm.right_limit();
    if (lim.status != improper_status::converged) {
      merge(rep.sa3, check_status::inconclusive,
            "scale limit unresolved at attainable endpoint x=" + format_double(e));
      return;
    }
    s_e = lim.value;
    auto integrand = [&](double x) {
      double a = d.vol(x);
      return validation_rate(p, x) * std::fabs(tr.s(x) - s_e) / (tr.sprime(x) * a * a);
    };
    merge(rep.sa3,
          endpoint_integrable(integrand, from, e, detail,
                              "endpoint integral of theta|s-s(e)|/(s'a^2)"),
          detail);
  };
  bool left_attainable = rep.endpoints.left.accessible ||
                         (iv.left_closed() && rep.endpoints.left.kind == endpoint_kind::unclassified);
  bool right_attainable = rep.endpoints.right.accessible ||
                          (iv.right_closed() && rep.endpoints.right.kind == endpoint_kind::unclassified);
  if (left_attainable) sa3_endpoint(probe_lo, iv.left, -1);
  if (right_attainable) sa3_endpoint(probe_hi, iv.right, +1);

  return rep;
}

}  // namespace pstop
