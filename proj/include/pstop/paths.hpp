#pragma once

#include <cstdint>
#include <vector>

#include "pstop/problem.hpp"
#include "pstop/rng.hpp"

namespace pstop::mc {

// Execution policy for path loops.  Both produce bitwise-identical results:
// path i consumes counter stream i regardless of scheduling, and reductions
// use fixed-order pairwise summation.
enum class run_mode { serial, parallel };

// Channel assignments within a path's stream.
inline constexpr std::uint32_t kStepChannel = 0;     // diffusion increments
inline constexpr std::uint32_t kMarkChannel = 1;     // Poisson marks / races
inline constexpr std::uint32_t kHorizonChannel = 2;  // exponential horizons

enum class step_scheme {
  euler,      // Euler-Maruyama, O(dt) weak error
  exact_bm,   // arithmetic BM with constant coefficients: exact transitions
  exact_gbm,  // geometric BM: exact log-space transitions
};

// Precomputed stepping recipe for one diffusion.  The exact schemes are
// enabled automatically when coefficient probing identifies constant (b, a)
// or constant (b/x, a/x) on a positive domain.
struct step_model {
  const diffusion_spec* dyn = nullptr;
  step_scheme scheme = step_scheme::euler;
  double mu = 0.0;     // exact schemes: drift coefficient
  double sigma = 0.0;  // exact schemes: volatility coefficient
  double lo = 0.0, hi = 0.0;
  bool absorb_lo = false, absorb_hi = false;

  // Advance one step of size dt from state x with standard normal z.
  // Returns the proposed state before boundary handling.
  double advance(double x, double dt, double z) const;
};

step_model make_step_model(const diffusion_spec& d);

// Dense storage for simulated paths.  Row-major: path i occupies
// states[i*(n_steps+1) .. i*(n_steps+1)+n_steps], representing times
// 0, dt, ..., n_steps*dt.  Absorbed paths are frozen at the endpoint from
// the absorption step onward.
struct path_bundle {
  double dt = 0.0;
  std::size_t n_steps = 0;
  std::size_t n_paths = 0;
  std::vector<double> states;
  std::vector<std::int64_t> absorbed_step;  // -1 if never absorbed
  std::vector<double> absorbed_time;        // linear-interpolated crossing time
  std::uint64_t seed = 0;
  std::uint64_t first_stream = 0;

  double state(std::size_t path, std::size_t step) const {
    return states[path * (n_steps + 1) + step];
  }
  const double* path(std::size_t i) const { return states.data() + i * (n_steps + 1); }
  bool absorbed(std::size_t i) const { return absorbed_step[i] >= 0; }
};

// Simulate n_paths independent paths from x0 over [0, horizon].
// Deterministic given (seed, first_stream): path i uses stream
// first_stream + i, channel kStepChannel.
path_bundle simulate_paths(const diffusion_spec& d, double x0, double dt,
                           double horizon, std::size_t n_paths,
                           std::uint64_t seed, std::uint64_t first_stream = 0,
                           run_mode mode = run_mode::parallel);

// Doeblin coupling: lower starts at x, upper at y (x <= y), independent
// noise (streams 2i and 2i+1) until the paths first cross at a grid time,
// after which both continue as one path driven by the lower stream.
// Guarantees lower <= upper at every grid time; the marginal law of each
// path is unchanged (the switch happens at a stopping time).
struct coupled_bundle {
  path_bundle lower, upper;
  std::vector<std::int64_t> merged_step;  // -1 if never merged
};

coupled_bundle doeblin_couple(const diffusion_spec& d, double x, double y,
                              double dt, double horizon, std::size_t n_paths,
                              std::uint64_t seed,
                              run_mode mode = run_mode::parallel);

}  // namespace pstop::mc
