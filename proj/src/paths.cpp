#include "pstop/paths.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pstop::mc {
namespace {

// Probe points inside the domain for coefficient-shape detection.
std::vector<double> probe_points(const interval_spec& dom) {
  double lo = dom.left, hi = dom.right;
  constexpr int n = 33;
  std::vector<double> xs;
  xs.reserve(n);
  if (lo >= 0.0 && !(std::isfinite(lo) && lo > 0.0 && std::isfinite(hi))) {
    // positive half-line style domain: geometric ladder
    double a = std::isfinite(lo) && lo > 0.0 ? lo * 1.01 : 1e-3;
    double b = std::isfinite(hi) ? hi * 0.99 : 1e3;
    for (int i = 0; i < n; ++i)
      xs.push_back(a * std::pow(b / a, double(i) / (n - 1)));
  } else {
    double a = std::isfinite(lo) ? lo : -10.0;
    double b = std::isfinite(hi) ? hi : 10.0;
    if (std::isfinite(lo) && !std::isfinite(hi)) b = lo + 20.0;
    if (!std::isfinite(lo) && std::isfinite(hi)) a = hi - 20.0;
    double pad = (b - a) / 100.0;
    a += pad;
    b -= pad;
    for (int i = 0; i < n; ++i) xs.push_back(a + (b - a) * i / (n - 1));
  }
  return xs;
}

bool nearly(double u, double v) {
  return std::abs(u - v) <= 1e-12 * (1.0 + std::abs(u) + std::abs(v));
}

}  // namespace

double step_model::advance(double x, double dt, double z) const {
  switch (scheme) {
    case step_scheme::exact_bm:
      return x + mu * dt + sigma * std::sqrt(dt) * z;
    case step_scheme::exact_gbm:
      return x * std::exp((mu - 0.5 * sigma * sigma) * dt +
                          sigma * std::sqrt(dt) * z);
    case step_scheme::euler:
    default:
      return x + dyn->drift(x) * dt + dyn->vol(x) * std::sqrt(dt) * z;
  }
}

step_model make_step_model(const diffusion_spec& d) {
  step_model m;
  m.dyn = &d;
  m.lo = d.domain.left;
  m.hi = d.domain.right;
  m.absorb_lo = d.domain.left_closed();
  m.absorb_hi = d.domain.right_closed();

  auto xs = probe_points(d.domain);
  double b0 = d.drift(xs[0]), a0 = d.vol(xs[0]);
  bool const_coeff = true;
  for (double x : xs)
    const_coeff = const_coeff && nearly(d.drift(x), b0) && nearly(d.vol(x), a0);
  if (const_coeff) {
    m.scheme = step_scheme::exact_bm;
    m.mu = b0;
    m.sigma = a0;
    return m;
  }
  if (d.domain.left >= 0.0 && xs[0] > 0.0) {
    double br = d.drift(xs[0]) / xs[0], ar = d.vol(xs[0]) / xs[0];
    bool linear_coeff = true;
    for (double x : xs)
      linear_coeff = linear_coeff && nearly(d.drift(x), br * x) &&
                     nearly(d.vol(x), ar * x);
    if (linear_coeff && ar > 0.0) {
      m.scheme = step_scheme::exact_gbm;
      m.mu = br;
      m.sigma = ar;
      return m;
    }
  }
  m.scheme = step_scheme::euler;
  return m;
}

namespace {

// Advance a single path in place; fills row[0..n_steps], sets absorption.
void run_one_path(const step_model& m, double x0, double dt,
                  std::size_t n_steps, std::uint64_t seed,
                  std::uint64_t stream, double* row,
                  std::int64_t* absorbed_step, double* absorbed_time) {
  rng::counter_stream cs(seed, stream, kStepChannel);
  double x = x0;
  row[0] = x;
  *absorbed_step = -1;
  *absorbed_time = 0.0;
  bool frozen = false;
  double frozen_at = 0.0;
  for (std::size_t j = 1; j <= n_steps; ++j) {
    if (frozen) {
      row[j] = frozen_at;
      continue;
    }
    double y = m.advance(x, dt, cs.normal());
    if (!std::isfinite(y))
      throw std::runtime_error("path " + std::to_string(stream) +
                               " produced a non-finite state at step " +
                               std::to_string(j));
    // Endpoint handling: absorbing endpoints freeze the path at the
    // linear-interpolated crossing; other endpoints clamp to the closure.
    if (m.absorb_lo && y <= m.lo) {
      double frac = (x - m.lo) / (x - y);
      *absorbed_step = std::int64_t(j);
      *absorbed_time = (double(j) - 1.0 + frac) * dt;
      frozen = true;
      frozen_at = m.lo;
      y = m.lo;
    } else if (m.absorb_hi && y >= m.hi) {
      double frac = (m.hi - x) / (y - x);
      *absorbed_step = std::int64_t(j);
      *absorbed_time = (double(j) - 1.0 + frac) * dt;
      frozen = true;
      frozen_at = m.hi;
      y = m.hi;
    } else {
      y = std::min(std::max(y, m.lo), m.hi);
    }
    row[j] = y;
    x = y;
  }
}

}  // namespace

path_bundle simulate_paths(const diffusion_spec& d, double x0, double dt,
                           double horizon, std::size_t n_paths,
                           std::uint64_t seed, std::uint64_t first_stream,
                           run_mode mode) {
  if (!(dt > 0.0) || !(horizon > 0.0))
    throw std::invalid_argument("simulate_paths: dt and horizon must be positive");
  if (!d.domain.contains(x0))
    throw std::invalid_argument("simulate_paths: x0 outside the state space");
  step_model m = make_step_model(d);

  path_bundle b;
  b.dt = dt;
  b.n_steps = std::size_t(std::ceil(horizon / dt - 1e-9));
  b.n_paths = n_paths;
  b.seed = seed;
  b.first_stream = first_stream;
  b.states.resize(n_paths * (b.n_steps + 1));
  b.absorbed_step.assign(n_paths, -1);
  b.absorbed_time.assign(n_paths, 0.0);

  auto body = [&](std::size_t i) {
    run_one_path(m, x0, dt, b.n_steps, seed, first_stream + i,
                 b.states.data() + i * (b.n_steps + 1), &b.absorbed_step[i],
                 &b.absorbed_time[i]);
  };
  if (mode == run_mode::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < std::int64_t(n_paths); ++i) body(std::size_t(i));
  } else {
    for (std::size_t i = 0; i < n_paths; ++i) body(i);
  }
  return b;
}

coupled_bundle doeblin_couple(const diffusion_spec& d, double x, double y,
                              double dt, double horizon, std::size_t n_paths,
                              std::uint64_t seed, run_mode mode) {
  if (!(x <= y))
    throw std::invalid_argument("doeblin_couple: requires x <= y");
  if (!(dt > 0.0) || !(horizon > 0.0))
    throw std::invalid_argument("doeblin_couple: dt and horizon must be positive");
  if (!d.domain.contains(x) || !d.domain.contains(y))
    throw std::invalid_argument("doeblin_couple: start outside the state space");
  step_model m = make_step_model(d);

  coupled_bundle cb;
  std::size_t n_steps = std::size_t(std::ceil(horizon / dt - 1e-9));
  for (path_bundle* b : {&cb.lower, &cb.upper}) {
    b->dt = dt;
    b->n_steps = n_steps;
    b->n_paths = n_paths;
    b->seed = seed;
    b->states.resize(n_paths * (n_steps + 1));
    b->absorbed_step.assign(n_paths, -1);
    b->absorbed_time.assign(n_paths, 0.0);
  }
  cb.merged_step.assign(n_paths, -1);

  auto settle = [&](double prev, double next, std::int64_t* astep,
                    double* atime, bool* frozen, double* frozen_at,
                    std::size_t j) -> double {
    if (m.absorb_lo && next <= m.lo) {
      double frac = (prev - m.lo) / (prev - next);
      *astep = std::int64_t(j);
      *atime = (double(j) - 1.0 + frac) * dt;
      *frozen = true;
      *frozen_at = m.lo;
      return m.lo;
    }
    if (m.absorb_hi && next >= m.hi) {
      double frac = (m.hi - prev) / (next - prev);
      *astep = std::int64_t(j);
      *atime = (double(j) - 1.0 + frac) * dt;
      *frozen = true;
      *frozen_at = m.hi;
      return m.hi;
    }
    return std::min(std::max(next, m.lo), m.hi);
  };

  auto body = [&](std::size_t i) {
    rng::counter_stream low(seed, 2 * i, kStepChannel);
    rng::counter_stream up(seed, 2 * i + 1, kStepChannel);
    double* lrow = cb.lower.states.data() + i * (n_steps + 1);
    double* urow = cb.upper.states.data() + i * (n_steps + 1);
    double xl = x, xu = y;
    lrow[0] = xl;
    urow[0] = xu;
    bool lfrozen = false, ufrozen = false;
    double lfrozen_at = 0.0, ufrozen_at = 0.0;
    bool merged = (x == y);
    if (merged) cb.merged_step[i] = 0;
    for (std::size_t j = 1; j <= n_steps; ++j) {
      double zl = low.normal();
      double zu = up.normal();  // drawn unconditionally: keeps streams aligned
      if (!lfrozen) {
        double nl = m.advance(xl, dt, zl);
        if (!std::isfinite(nl))
          throw std::runtime_error("coupled pair " + std::to_string(i) +
                                   " produced a non-finite state");
        xl = settle(xl, nl, &cb.lower.absorbed_step[i],
                    &cb.lower.absorbed_time[i], &lfrozen, &lfrozen_at, j);
      }
      if (merged) {
        xu = xl;
        if (!ufrozen) {
          cb.upper.absorbed_step[i] = cb.lower.absorbed_step[i];
          cb.upper.absorbed_time[i] = cb.lower.absorbed_time[i];
        }
        ufrozen = lfrozen;
      } else if (!ufrozen) {
        double nu = m.advance(xu, dt, zu);
        if (!std::isfinite(nu))
          throw std::runtime_error("coupled pair " + std::to_string(i) +
                                   " produced a non-finite state");
        xu = settle(xu, nu, &cb.upper.absorbed_step[i],
                    &cb.upper.absorbed_time[i], &ufrozen, &ufrozen_at, j);
      }
      if (!merged && xl >= xu) {
        // first grid-time crossing: merge onto the lower stream's future
        merged = true;
        cb.merged_step[i] = std::int64_t(j);
        xu = xl;
        if (!ufrozen) {
          cb.upper.absorbed_step[i] = cb.lower.absorbed_step[i];
          cb.upper.absorbed_time[i] = cb.lower.absorbed_time[i];
        }
        ufrozen = lfrozen;
      }
      lrow[j] = xl;
      urow[j] = xu;
    }
  };
  if (mode == run_mode::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < std::int64_t(n_paths); ++i) body(std::size_t(i));
  } else {
    for (std::size_t i = 0; i < n_paths; ++i) body(i);
  }
  return cb;
}

}  // namespace pstop::mc
