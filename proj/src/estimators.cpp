#include "pstop/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pstop/classify.hpp"
#include "pstop/summation.hpp"

namespace pstop::mc {
namespace {

constexpr double kTimeChangeCap = 50.0;  // P(Exp(1) > 50) ~ 2e-22

struct path_outcome {
  double value = 0.0;
  double tail = 0.0;
  bool finished = true;
};

// Reduce per-path outcomes to an estimate with fixed-order pairwise sums.
estimate reduce(const std::vector<path_outcome>& out, std::uint64_t seed) {
  std::size_t n = out.size();
  std::vector<double> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = out[i].value;
  double mean = pairwise_sum(buf) / double(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = out[i].value - mean;
    buf[i] = d * d;
  }
  double var = n > 1 ? pairwise_sum(buf) / double(n - 1) : 0.0;
  for (std::size_t i = 0; i < n; ++i) buf[i] = out[i].tail;
  double tail_mass = pairwise_sum(buf) / double(n);
  std::size_t unfinished = 0;
  for (const auto& o : out) unfinished += o.finished ? 0 : 1;

  estimate e;
  e.value = mean;
  e.std_error = std::sqrt(var / double(n));
  e.n_paths = n;
  e.unfinished_fraction = double(unfinished) / double(n);
  e.bias_bound = tail_mass;
  e.seed = seed;
  return e;
}

template <class Body>
std::vector<path_outcome> run_paths(std::size_t n, run_mode mode, Body body) {
  std::vector<path_outcome> out(n);
  if (mode == run_mode::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < std::int64_t(n); ++i)
      out[std::size_t(i)] = body(std::size_t(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = body(i);
  }
  return out;
}

[[noreturn]] void bad_state(std::uint64_t stream) {
  throw std::runtime_error("estimator path " + std::to_string(stream) +
                           " produced a non-finite state");
}

// Absorbed paths finish analytically: the state is frozen at e, so the
// running race fires at an exactly computable time (no horizon truncation).
// A frozen state below the threshold never stops and is worth 0.
path_outcome finish_frozen(const problem_spec& p, double e, double threshold,
                           double t, double hazard, double target) {
  double rate = p.capped_rate(e);
  if (rate <= 0.0 || e < threshold) return {0.0, 0.0, true};
  double u = t + (target - hazard) / rate;
  return {std::exp(-p.beta * u) * p.payoff(e), 0.0, true};
}

path_outcome policy_path(const problem_spec& p, const step_model& m,
                         double threshold, double x0, double dt,
                         std::size_t n_steps, std::uint64_t seed,
                         std::uint64_t stream) {
  rng::counter_stream steps(seed, stream, kStepChannel);
  rng::counter_stream race(seed, stream, kMarkChannel);
  double x = x0;
  double t = 0.0;
  double target = race.exponential(1.0);
  double hazard = 0.0;

  for (std::size_t j = 0; j < n_steps; ++j) {
    double t_next = dt * double(j + 1);
    while (true) {
      double rate = p.capped_rate(x);
      double span = t_next - t;
      double dh = rate * span;
      if (rate > 0.0 && hazard + dh >= target) {
        // event inside this span; exact sub-step to the event time
        double u = t + (target - hazard) / rate;
        double xu = m.advance(x, std::max(u - t, 0.0), steps.normal());
        if (!std::isfinite(xu)) bad_state(stream);
        if ((m.absorb_lo && xu <= m.lo) || (m.absorb_hi && xu >= m.hi)) {
          // absorbed at the event time: stop here or never
          double e = xu <= m.lo ? m.lo : m.hi;
          if (e >= threshold)
            return {std::exp(-p.beta * u) * p.payoff(e), 0.0, true};
          return {0.0, 0.0, true};
        }
        xu = std::min(std::max(xu, m.lo), m.hi);
        if (xu >= threshold)
          return {std::exp(-p.beta * u) * p.payoff(xu), 0.0, true};
        x = xu;
        t = u;
        target = race.exponential(1.0);
        hazard = 0.0;
        continue;
      }
      hazard += dh;
      double xn = m.advance(x, span, steps.normal());
      if (!std::isfinite(xn)) bad_state(stream);
      if (m.absorb_lo && xn <= m.lo)
        return finish_frozen(p, m.lo, threshold, t_next, hazard, target);
      if (m.absorb_hi && xn >= m.hi)
        return finish_frozen(p, m.hi, threshold, t_next, hazard, target);
      x = std::min(std::max(xn, m.lo), m.hi);
      t = t_next;
      break;
    }
  }
  return {0.0, std::exp(-p.beta * t) * std::max(p.payoff(x), 0.0), false};
}

void check_options(const mc_options& opt) {
  if (opt.n_paths == 0)
    throw std::invalid_argument("mc: n_paths must be positive");
  if (!(opt.dt > 0.0)) throw std::invalid_argument("mc: dt must be positive");
}

}  // namespace

bool estimate::consistent_with(const estimate& other, double k) const {
  double se = std::sqrt(std_error * std_error + other.std_error * other.std_error);
  return std::abs(value - other.value) <= k * se;
}

estimate evaluate_policy(const problem_spec& p, double threshold, double x0,
                         const mc_options& opt) {
  check_options(opt);
  if (!p.dyn.domain.contains(x0))
    throw std::invalid_argument("evaluate_policy: x0 outside the state space");
  step_model m = make_step_model(p.dyn);
  double horizon = opt.resolved_horizon(p.beta);
  auto n_steps = std::size_t(std::ceil(horizon / opt.dt - 1e-9));
  auto out = run_paths(opt.n_paths, opt.mode, [&](std::size_t i) {
    return policy_path(p, m, threshold, x0, opt.dt, n_steps, opt.seed, i);
  });
  return reduce(out, opt.seed);
}

estimate estimate_G_direct(const problem_spec& p, double x0,
                           const mc_options& opt) {
  return evaluate_policy(p, -std::numeric_limits<double>::infinity(), x0, opt);
}

estimate estimate_G_time_changed(const problem_spec& p, double x0,
                                 const mc_options& opt) {
  check_options(opt);
  if (!p.dyn.domain.contains(x0))
    throw std::invalid_argument("estimate_G: x0 outside the state space");
  diffusion_spec ydyn = time_change_coefficients(p, /*capped=*/true);
  step_model m = make_step_model(ydyn);
  auto out = run_paths(opt.n_paths, opt.mode, [&](std::size_t i) -> path_outcome {
    rng::counter_stream steps(opt.seed, i, kStepChannel);
    rng::counter_stream hor(opt.seed, i, kHorizonChannel);
    double T = std::min(hor.exponential(1.0), kTimeChangeCap);
    double y = x0;
    double t = 0.0;
    while (t < T) {
      double span = std::min(opt.dt, T - t);
      double yn = m.advance(y, span, steps.normal());
      if (!std::isfinite(yn)) bad_state(i);
      if (m.absorb_lo && yn <= m.lo) {
        y = m.lo;
        break;
      }
      if (m.absorb_hi && yn >= m.hi) {
        y = m.hi;
        break;
      }
      y = std::min(std::max(yn, m.lo), m.hi);
      t += span;
    }
    return {psi_capped(p, y), 0.0, true};
  });
  return reduce(out, opt.seed);
}

double g_estimates::discrepancy_sigmas() const {
  double se = std::sqrt(direct.std_error * direct.std_error +
                        time_changed.std_error * time_changed.std_error);
  if (se == 0.0) return direct.value == time_changed.value ? 0.0 : 1e300;
  return std::abs(direct.value - time_changed.value) / se;
}

g_estimates estimate_G(const problem_spec& p, double x0, const mc_options& opt) {
  return {estimate_G_direct(p, x0, opt), estimate_G_time_changed(p, x0, opt)};
}

}  // namespace pstop::mc
