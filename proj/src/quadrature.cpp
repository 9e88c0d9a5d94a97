#include "pstop/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pstop/expr.hpp"

namespace pstop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (Kronrod abscissae are
// symmetric; Gauss points are the odd-indexed entries plus the centre).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct panel_est {
  double gk = 0.0;
  double err = 0.0;
  bool finite = true;
};

double safe_eval(const real_fn& f, double x, bool& finite) {
  double v;
  try {
    v = f(x);
  } catch (const eval_error&) {
    finite = false;
    return 0.0;
  }
  if (!std::isfinite(v)) {
    finite = false;
    return 0.0;
  }
  return v;
}

panel_est gk15(const real_fn& f, double a, double b) {
  panel_est out;
  double c = 0.5 * (a + b);
  double h = 0.5 * (b - a);
  double fc = safe_eval(f, c, out.finite);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    double f1 = safe_eval(f, c - h * kXgk[j], out.finite);
    double f2 = safe_eval(f, c + h * kXgk[j], out.finite);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  out.gk = resk * h;
  out.err = std::fabs((resk - resg) * h);
  if (!out.finite) out.err = kInf;
  return out;
}

struct panel {
  double a, b;
  panel_est est;
  int depth;
};

}  // namespace

std::string to_string(improper_status s) {
  switch (s) {
    case improper_status::converged:
      return "converged";
    case improper_status::diverged:
      return "diverged";
    case improper_status::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

quad_result integrate(const real_fn& f, double a, double b, double abs_tol, double rel_tol,
                      int max_depth) {
  quad_result out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }

  std::vector<panel> panels;
  panels.push_back({a, b, gk15(f, a, b), 0});
  const std::size_t max_panels = 4096;

  auto totals = [&]() {
    double v = 0.0, e = 0.0;
    for (const auto& p : panels) {
      v += p.est.gk;
      e += p.est.err;
    }
    return std::pair<double, double>(v, e);
  };

  while (true) {
    auto [value, err] = totals();
    double tol = std::fmax(abs_tol, rel_tol * std::fabs(value));
    if (err <= tol) {
      out.value = sign * value;
      out.error = err;
      out.converged = true;
      return out;
    }
    // split the worst panel
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i)
      if (panels[i].est.err > panels[worst].est.err) worst = i;
    panel p = panels[worst];
    double width_floor = 16.0 * std::numeric_limits<double>::epsilon() *
                         (std::fabs(p.a) + std::fabs(p.b) + 1.0);
    if (p.depth >= max_depth || (p.b - p.a) < width_floor || panels.size() >= max_panels) {
      out.value = sign * value;
      out.error = err;
      out.converged = false;
      if (!p.est.finite) out.bad_point = 0.5 * (p.a + p.b);
      return out;
    }
    double mid = 0.5 * (p.a + p.b);
    panels[worst] = {p.a, mid, gk15(f, p.a, mid), p.depth + 1};
    panels.push_back({mid, p.b, gk15(f, mid, p.b), p.depth + 1});
  }
}

improper_result integrate_toward(const real_fn& f, double from, double toward,
                                 const improper_options& opt) {
  improper_result out;
  if (from == toward || std::isnan(from) || std::isnan(toward) || std::isinf(from)) {
    out.detail = "invalid improper-integral range";
    return out;
  }

  const double dir = toward > from ? 1.0 : -1.0;
  const bool finite_target = std::isfinite(toward);

  // shell boundary after level k (boundaries move geometrically toward the target)
  auto boundary = [&](int k) {
    if (finite_target) return toward + (from - toward) * std::ldexp(1.0, -k);
    return from + dir * (std::ldexp(1.0, k) - 1.0) * std::fmax(1.0, std::fabs(from));
  };

  double total = 0.0;
  std::vector<double> shells;
  std::vector<double> ratios;
  double prev_b = from;

  for (int k = 1; k <= opt.max_levels; ++k) {
    double next_b = boundary(k);
    if (finite_target) {
      double min_width = 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(toward);
      if (std::fabs(next_b - toward) <= min_width) {
        // interval exhausted to rounding; whatever accumulated is the value
        out.status = improper_status::converged;
        out.value = total;
        out.levels = k;
        out.last_shell = shells.empty() ? 0.0 : std::fabs(shells.back());
        out.detail = "interval exhausted at floating-point resolution";
        return out;
      }
    }

    quad_result shell = dir > 0 ? integrate(f, prev_b, next_b, opt.panel_abs_tol,
                                            opt.panel_rel_tol)
                                : integrate(f, next_b, prev_b, opt.panel_abs_tol,
                                            opt.panel_rel_tol);
    if (!shell.converged && !std::isnan(shell.bad_point)) {
      out.status = improper_status::inconclusive;
      out.levels = k;
      out.detail = "integrand not finite near x=" + format_double(shell.bad_point);
      return out;
    }
    double s = shell.value;
    total += s;
    if (!shells.empty()) {
      double prev = std::fabs(shells.back());
      ratios.push_back(prev > 0 ? std::fabs(s) / prev : 0.0);
    }
    shells.push_back(s);
    out.levels = k;
    out.last_shell = std::fabs(s);

    double small = std::fmax(opt.abs_floor, opt.rel_tol * std::fabs(total));

    // settled: the last four shells are negligible
    if (k >= 6) {
      bool all_small = true;
      for (std::size_t i = shells.size() - 4; i < shells.size(); ++i)
        if (std::fabs(shells[i]) > small) all_small = false;
      if (all_small) {
        out.status = improper_status::converged;
        out.value = total;
        out.detail = "shell contributions below tolerance";
        return out;
      }
    }

    // stable geometric decay: accept with extrapolated tail
    if (ratios.size() >= 6) {
      bool geometric = true;
      double rmax = 0.0;
      for (std::size_t i = ratios.size() - 6; i < ratios.size(); ++i) {
        if (!(ratios[i] > 0.0 && ratios[i] <= 0.95)) geometric = false;
        rmax = std::fmax(rmax, ratios[i]);
      }
      if (geometric && k >= 10) {
        out.status = improper_status::converged;
        out.value = total + s * rmax / (1.0 - rmax);
        out.detail = "geometric shell decay, tail extrapolated";
        return out;
      }
    }

    // divergence: partial sums grew by >= 10x over four levels
    if (k >= 5 && std::fabs(total) > 100.0 * opt.abs_floor) {
      double old = 0.0;
      for (std::size_t i = 0; i + 4 < shells.size(); ++i) old += shells[i];
      if (std::fabs(old) > opt.abs_floor && std::fabs(total) >= 10.0 * std::fabs(old)) {
        out.status = improper_status::diverged;
        out.detail = "partial sums grew 10x across four shell levels";
        return out;
      }
    }

    // divergence: shell contributions refuse to decay (logarithmic signature)
    if (ratios.size() >= 12 && std::fabs(s) > small) {
      bool flat = true;
      for (std::size_t i = ratios.size() - 12; i < ratios.size(); ++i)
        if (!(ratios[i] >= 0.97 && ratios[i] <= 1.03)) flat = false;
      if (flat) {
        out.status = improper_status::diverged;
        out.detail = "non-vanishing shell contributions (logarithmic divergence)";
        return out;
      }
    }

    prev_b = next_b;
  }

  // budget exhausted: one last chance to call it diverged on non-decay
  double small = std::fmax(opt.abs_floor, opt.rel_tol * std::fabs(total));
  if (ratios.size() >= 4 && out.last_shell > small) {
    bool nondecaying = true;
    for (std::size_t i = ratios.size() - 4; i < ratios.size(); ++i)
      if (ratios[i] < 0.97) nondecaying = false;
    if (nondecaying) {
      out.status = improper_status::diverged;
      out.detail = "shell contributions not vanishing at level budget";
      return out;
    }
  }
  out.status = improper_status::inconclusive;
  out.detail = "level budget exhausted without a verdict";
  return out;
}

}  // namespace pstop
