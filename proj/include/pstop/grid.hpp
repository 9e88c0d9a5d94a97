#pragma once

#include <cstddef>
#include <vector>

#include "pstop/problem.hpp"

namespace pstop {

enum class grid_spacing { uniform, logarithmic };

// Strictly increasing node list covering the working range of a solve.  A
// node sits on a domain endpoint only when that endpoint is absorbing; for
// natural endpoints the grid truncates strictly inside the open interval.
struct grid {
  std::vector<double> nodes;
  grid_spacing spacing = grid_spacing::uniform;

  static grid uniform(double lo, double hi, std::size_t n);
  static grid logarithmic(double lo, double hi, std::size_t n);
  // Node at 0 followed by a logarithmic ladder on [lo, hi]; for problems
  // absorbed at the origin.
  static grid logarithmic_with_zero(double lo, double hi, std::size_t n);

  std::size_t size() const { return nodes.size(); }
  double lo() const { return nodes.front(); }
  double hi() const { return nodes.back(); }
  double operator[](std::size_t i) const { return nodes[i]; }

  // Largest i with nodes[i] <= x, clamped to [0, size()-2]; the segment used
  // for interpolation at x.
  std::size_t segment(std::size_t hint, double x) const;
};

void check_grid(const grid& g);

// Default truncation policy.  Finite endpoints are kept (absorbing) or
// approached to within a 1/50 offset toward the query scale (non-absorbing);
// an infinite right end of a positive domain truncates at 50 * scale; an
// infinite end of a line problem truncates at 10 diffusive standard
// deviations a(scale) / sqrt(2 beta) past the query scale.
grid default_grid(const problem_spec& p, double scale, std::size_t n,
                  grid_spacing spacing);

}  // namespace pstop
