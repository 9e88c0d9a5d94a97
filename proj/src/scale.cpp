#include "pstop/scale.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pstop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void monotone_cubic::build(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("monotone_cubic needs >= 2 nodes");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("monotone_cubic nodes must increase");
  const std::size_t n = xs.size();
  std::vector<double> h(n - 1), delta(n - 1), d(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = xs[i + 1] - xs[i];
    delta[i] = (ys[i + 1] - ys[i]) / h[i];
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0) return 0.0;
    if (d0 * d1 < 0.0 && std::fabs(s) > 3.0 * std::fabs(d0)) return 3.0 * d0;
    return s;
  };
  if (n == 2) {
    d[0] = d[1] = delta[0];
  } else {
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) {
        d[i] = 0.0;
      } else {
        double w1 = 2.0 * h[i] + h[i - 1];
        double w2 = h[i] + 2.0 * h[i - 1];
        d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
  }
  x_ = std::move(xs);
  y_ = std::move(ys);
  d_ = std::move(d);
}

double monotone_cubic::operator()(double t) const {
  const std::size_t n = x_.size();
  if (t <= x_.front()) return y_.front() + d_.front() * (t - x_.front());
  if (t >= x_.back()) return y_.back() + d_.back() * (t - x_.back());
  std::size_t hi = static_cast<std::size_t>(
      std::upper_bound(x_.begin(), x_.end(), t) - x_.begin());
  std::size_t lo = hi - 1;
  double h = x_[hi] - x_[lo];
  double u = (t - x_[lo]) / h;
  double u2 = u * u, u3 = u2 * u;
  double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
  double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
  return h00 * y_[lo] + h10 * h * d_[lo] + h01 * y_[hi] + h11 * h * d_[hi];
}

bool provably_zero(const scalar_function& f) {
  auto b = f.provable_bound();
  return b.has_value() && *b == 0.0;
}

double default_anchor(const interval_spec& iv) {
  bool lf = std::isfinite(iv.left), rf = std::isfinite(iv.right);
  if (lf && rf) return 0.5 * (iv.left + iv.right);
  if (lf) return iv.left + 1.0;
  if (rf) return iv.right - 1.0;
  return 0.0;
}

namespace {

real_fn drift_density(const diffusion_spec& d) {
  return [&d](double x) {
    double a = d.vol(x);
    return 2.0 * d.drift(x) / (a * a);
  };
}

}  // namespace

scale_tracker::scale_tracker(const diffusion_spec& d, double x0, double b0, double s0,
                             int direction)
    : d_(&d), dir_(direction), zero_drift_(provably_zero(d.drift)) {
  bps_.push_back({x0, b0, s0});
}

const scale_tracker::breakpoint& scale_tracker::anchor_for(double x) {
  if (ahead(x, bps_.back().x)) {
    // extend the frontier to x
    breakpoint back = bps_.back();
    double db = 0.0, ds;
    if (zero_drift_) {
      ds = x - back.x;
    } else {
      auto dens = drift_density(*d_);
      db = integrate(dens, back.x, x).value;
      double bx = back.x, bb = back.b_int;
      ds = integrate(
               [bx, bb, &dens](double xi) {
                 return std::exp(-(bb + integrate(dens, bx, xi).value));
               },
               back.x, x)
               .value;
    }
    bps_.push_back({x, back.b_int + db, back.s + ds});
    return bps_.back();
  }
  // nearest breakpoint on the x0 side of x
  for (std::size_t i = bps_.size(); i-- > 0;)
    if (!ahead(bps_[i].x, x)) return bps_[i];
  return bps_.front();
}

double scale_tracker::b_int_at(double x) {
  if (zero_drift_) return 0.0;
  const breakpoint& bp = anchor_for(x);
  if (bp.x == x) return bp.b_int;
  return bp.b_int + integrate(drift_density(*d_), bp.x, x).value;
}

double scale_tracker::sprime(double x) { return std::exp(-b_int_at(x)); }

double scale_tracker::s(double x) {
  const breakpoint& bp = anchor_for(x);
  if (zero_drift_) return bp.s + (x - bp.x);
  if (bp.x == x) return bp.s;
  double bx = bp.x, bb = bp.b_int;
  auto dens = drift_density(*d_);
  return bp.s +
         integrate(
             [bx, bb, &dens](double xi) {
               return std::exp(-(bb + integrate(dens, bx, xi).value));
             },
             bp.x, x)
             .value;
}

scale_map::scale_map(const diffusion_spec& d, double tab_lo, double tab_hi, int n_nodes)
    : d_(&d), tab_lo_(tab_lo), tab_hi_(tab_hi) {
  if (!(tab_lo < tab_hi)) throw std::invalid_argument("scale_map: tab_lo must be < tab_hi");
  anchor_ = default_anchor(d.domain);
  if (anchor_ < tab_lo || anchor_ > tab_hi) anchor_ = 0.5 * (tab_lo + tab_hi);
  zero_drift_ = provably_zero(d.drift);

  if (!zero_drift_) {
    // node ladder (log-spaced on wide positive ranges), with the anchor inserted
    std::vector<double> xs;
    bool log_grid = tab_lo > 0 && tab_hi / tab_lo >= 100.0;
    xs.reserve(static_cast<std::size_t>(n_nodes) + 1);
    for (int i = 0; i < n_nodes; ++i) {
      double t = static_cast<double>(i) / (n_nodes - 1);
      xs.push_back(log_grid ? tab_lo * std::pow(tab_hi / tab_lo, t)
                            : tab_lo + (tab_hi - tab_lo) * t);
    }
    xs.push_back(anchor_);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::size_t ia = static_cast<std::size_t>(
        std::lower_bound(xs.begin(), xs.end(), anchor_) - xs.begin());
    const std::size_t n = xs.size();
    std::vector<double> b_int(n, 0.0), s(n, 0.0);
    auto dens = drift_density(d);
    auto panel_s = [&](std::size_t i, std::size_t j) {
      // int_{x_i}^{x_j} exp(-b_int(xi)) dxi with b_int anchored at node i
      double bi = b_int[i], xi0 = xs[i];
      return integrate(
                 [&dens, bi, xi0](double xi) {
                   return std::exp(-(bi + integrate(dens, xi0, xi).value));
                 },
                 xs[i], xs[j])
          .value;
    };
    for (std::size_t i = ia; i + 1 < n; ++i) {
      b_int[i + 1] = b_int[i] + integrate(dens, xs[i], xs[i + 1]).value;
      s[i + 1] = s[i] + panel_s(i, i + 1);
    }
    for (std::size_t i = ia; i-- > 0;) {
      b_int[i] = b_int[i + 1] + integrate(dens, xs[i + 1], xs[i]).value;
      s[i] = s[i + 1] + panel_s(i + 1, i);
    }
    std::vector<double> neg_b(n);
    for (std::size_t i = 0; i < n; ++i) neg_b[i] = -b_int[i];
    s_of_x_.build(xs, s);
    neg_b_int_.build(xs, neg_b);
    // s can saturate in double precision under strong mean reversion; the
    // inverse table keeps only nodes where s still strictly increases
    std::vector<double> s_inv, x_inv;
    s_inv.reserve(n);
    x_inv.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (s_inv.empty() || s[i] > s_inv.back()) {
        s_inv.push_back(s[i]);
        x_inv.push_back(xs[i]);
      }
    }
    if (s_inv.size() < 2)
      throw std::invalid_argument("scale_map: scale function is numerically flat");
    x_of_s_.build(std::move(s_inv), std::move(x_inv));
  }

  // limits of s at the true interval endpoints
  auto limit = [&](double edge, double e, int dir) {
    improper_result r;
    if (std::isfinite(e) && e == edge) {
      r.status = improper_status::converged;
      r.value = s(edge);
      r.detail = "endpoint inside tabulated range";
      return r;
    }
    if (zero_drift_) {
      if (std::isfinite(e)) {
        r.status = improper_status::converged;
        r.value = e - anchor_;
      } else {
        r.status = improper_status::diverged;
        r.detail = "zero drift: s(x) = x - c";
      }
      return r;
    }
    scale_tracker tr(*d_, edge, -neg_b_int_(edge), s_of_x_(edge), dir);
    improper_result ir = integrate_toward([&tr](double x) { return tr.sprime(x); }, edge, e);
    if (ir.status == improper_status::converged)
      ir.value = dir < 0 ? s_of_x_(edge) - ir.value : s_of_x_(edge) + ir.value;
    return ir;
  };
  left_limit_ = limit(tab_lo_, d.domain.left, -1);
  right_limit_ = limit(tab_hi_, d.domain.right, +1);
}

double scale_map::log_sprime_extend(double x) const {
  double edge = x < tab_lo_ ? tab_lo_ : tab_hi_;
  return neg_b_int_(edge) - integrate(drift_density(*d_), edge, x).value;
}

double scale_map::sprime(double x) const {
  if (zero_drift_) return 1.0;
  if (x >= tab_lo_ && x <= tab_hi_) return std::exp(neg_b_int_(x));
  return std::exp(log_sprime_extend(x));
}

double scale_map::s(double x) const {
  if (zero_drift_) return x - anchor_;
  if (x >= tab_lo_ && x <= tab_hi_) return s_of_x_(x);
  double edge = x < tab_lo_ ? tab_lo_ : tab_hi_;
  double le = neg_b_int_(edge);
  auto dens = drift_density(*d_);
  return s_of_x_(edge) +
         integrate(
             [&](double xi) { return std::exp(le - integrate(dens, edge, xi).value); },
             edge, x)
             .value;
}

double scale_map::x_from_s(double m) const {
  if (zero_drift_) return anchor_ + m;
  return x_of_s_(m);
}

}  // namespace pstop
