#pragma once

#include <vector>

#include "pstop/problem.hpp"
#include "pstop/quadrature.hpp"

namespace pstop {

// Shape-preserving cubic interpolant (Fritsch-Carlson slopes).  Handles
// non-monotone data; on monotone data the interpolant is monotone, which is
// what makes it safe for inverting the scale function.
class monotone_cubic {
 public:
  void build(std::vector<double> xs, std::vector<double> ys);
  double operator()(double t) const;
  bool ready() const { return !x_.empty(); }
  const std::vector<double>& xs() const { return x_; }
  const std::vector<double>& ys() const { return y_; }

 private:
  std::vector<double> x_, y_, d_;
};

// True when f is provably the zero function (constant literal 0).
bool provably_zero(const scalar_function& f);

// Anchor point c for the scale normalization s(c)=0, s'(c)=1: the interval
// midpoint when both endpoints are finite, c=left+1 (resp. right-1) for
// half-lines, 0 for the whole line.
double default_anchor(const interval_spec& iv);

// Tabulated scale function s'(x) = exp(-int_c^x 2b/a^2), s(x) = int_c^x s' on
// a working range [tab_lo, tab_hi] inside the interval.  Values outside the
// table are extended by direct quadrature.  When the drift is provably zero
// the map is exact: s(x) = x - c.
class scale_map {
 public:
  scale_map() = default;
  scale_map(const diffusion_spec& d, double tab_lo, double tab_hi, int n_nodes = 4097);

  double s(double x) const;
  double sprime(double x) const;
  double x_from_s(double m) const;

  double anchor() const { return anchor_; }
  double tab_lo() const { return tab_lo_; }
  double tab_hi() const { return tab_hi_; }
  bool zero_drift() const { return zero_drift_; }

  // s at the true interval endpoints (limits; may diverge to +/-inf).
  const improper_result& left_limit() const { return left_limit_; }
  const improper_result& right_limit() const { return right_limit_; }

 private:
  const diffusion_spec* d_ = nullptr;
  double anchor_ = 0.0, tab_lo_ = 0.0, tab_hi_ = 0.0;
  bool zero_drift_ = false;
  monotone_cubic s_of_x_, neg_b_int_, x_of_s_;  // neg_b_int_ = -int 2b/a^2 = log s'
  improper_result left_limit_, right_limit_;

  double log_sprime_extend(double x) const;
};

// Incremental evaluator of (s, s') along a monotone march from `x0` toward an
// endpoint, for improper integrals whose integrand involves the scale
// function.  Queries may arrive in any order inside the current shell; the
// breakpoint table extends only toward the endpoint.
class scale_tracker {
 public:
  scale_tracker(const diffusion_spec& d, double x0, double b0, double s0, int direction);

  double sprime(double x);
  double s(double x);

 private:
  struct breakpoint {
    double x, b_int, s;  // b_int = int_c^x 2b/a^2 along the march
  };
  const diffusion_spec* d_;
  int dir_;  // +1 marching right, -1 marching left
  bool zero_drift_;
  std::vector<breakpoint> bps_;

  bool ahead(double x, double y) const { return dir_ > 0 ? x > y : x < y; }
  const breakpoint& anchor_for(double x);
  double b_int_at(double x);
};

}  // namespace pstop
