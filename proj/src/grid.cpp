#include "pstop/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pstop {

namespace {

constexpr std::size_t kMinNodes = 16;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void check_grid(const grid& g) {
  require(g.nodes.size() >= kMinNodes, "grid: need at least 16 nodes");
  for (std::size_t i = 0; i + 1 < g.nodes.size(); ++i) {
    require(std::isfinite(g.nodes[i]) && g.nodes[i] < g.nodes[i + 1],
            "grid: nodes must be finite and strictly increasing");
  }
  require(std::isfinite(g.nodes.back()), "grid: nodes must be finite");
}

grid grid::uniform(double lo, double hi, std::size_t n) {
  require(n >= kMinNodes, "grid: need at least 16 nodes");
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi,
          "grid: bounds must be finite with lo < hi");
  grid g;
  g.spacing = grid_spacing::uniform;
  g.nodes.resize(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g.nodes[i] = lo + h * static_cast<double>(i);
  g.nodes.back() = hi;
  return g;
}

grid grid::logarithmic(double lo, double hi, std::size_t n) {
  require(n >= kMinNodes, "grid: need at least 16 nodes");
  require(lo > 0.0 && std::isfinite(hi) && lo < hi,
          "grid: logarithmic bounds must satisfy 0 < lo < hi");
  grid g;
  g.spacing = grid_spacing::logarithmic;
  g.nodes.resize(n);
  const double llo = std::log(lo);
  const double step = (std::log(hi) - llo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    g.nodes[i] = std::exp(llo + step * static_cast<double>(i));
  g.nodes.front() = lo;
  g.nodes.back() = hi;
  return g;
}

grid grid::logarithmic_with_zero(double lo, double hi, std::size_t n) {
  require(n >= kMinNodes, "grid: need at least 16 nodes");
  grid g = logarithmic(lo, hi, n - 1);
  g.nodes.insert(g.nodes.begin(), 0.0);
  return g;
}

std::size_t grid::segment(std::size_t hint, double x) const {
  const std::size_t last = nodes.size() - 2;
  if (hint <= last && nodes[hint] <= x && x < nodes[hint + 1]) return hint;
  auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  if (it == nodes.begin()) return 0;
  std::size_t i = static_cast<std::size_t>(it - nodes.begin()) - 1;
  return std::min(i, last);
}

grid default_grid(const problem_spec& p, double scale, std::size_t n,
                  grid_spacing spacing) {
  const interval_spec& iv = p.dyn.domain;
  require(std::isfinite(scale), "default_grid: query scale must be finite");
  require(iv.left < scale && scale < iv.right,
          "default_grid: query scale must be interior");

  double lo, hi;
  if (std::isfinite(iv.left)) {
    lo = iv.left_closed() ? iv.left : iv.left + (scale - iv.left) / 50.0;
  } else {
    const double sd = p.dyn.vol(scale) / std::sqrt(2.0 * p.beta);
    lo = scale - 10.0 * sd;
  }
  if (std::isfinite(iv.right)) {
    hi = iv.right_closed() ? iv.right : iv.right - (iv.right - scale) / 50.0;
  } else if (lo >= 0.0) {
    require(scale > 0.0, "default_grid: positive domain needs a positive scale");
    hi = 50.0 * scale;
  } else {
    const double sd = p.dyn.vol(scale) / std::sqrt(2.0 * p.beta);
    hi = scale + 10.0 * sd;
  }

  if (spacing == grid_spacing::logarithmic) {
    if (lo > 0.0) return grid::logarithmic(lo, hi, n);
    if (lo == 0.0 && iv.left_closed())
      return grid::logarithmic_with_zero(scale / 50.0, hi, n);
  }
  return grid::uniform(lo, hi, n);
}

}  // namespace pstop
