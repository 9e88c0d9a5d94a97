#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pstop/estimators.hpp"
#include "pstop/marks.hpp"
#include "pstop/paths.hpp"
#include "pstop/problem.hpp"
#include "pstop/rng.hpp"

using namespace pstop;
using namespace pstop::mc;

namespace {

std::string problems_dir() { return PSTOP_PROBLEMS_DIR; }

problem_spec load(const char* name) {
  return load_problem(problems_dir() + "/" + std::string(name) + ".json");
}

diffusion_spec line_bm() {
  diffusion_spec d;
  d.drift = scalar_function::from_expression("0");
  d.vol = scalar_function::from_expression("1");
  return d;
}

}  // namespace

TEST_CASE("philox_known_answer_vectors") {
  // Reference vectors from the Random123 distribution (kat_vectors.txt).
  auto r = rng::philox4x32({0u, 0u, 0u, 0u}, {0u, 0u});
  CHECK(r[0] == 0x6627e8d5u);
  CHECK(r[1] == 0xe169c58du);
  CHECK(r[2] == 0xbc57ac4cu);
  CHECK(r[3] == 0x9b00dbd8u);

  r = rng::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                      {0xffffffffu, 0xffffffffu});
  CHECK(r[0] == 0x408f276du);
  CHECK(r[1] == 0x41c83b0eu);
  CHECK(r[2] == 0xa20bc7c6u);
  CHECK(r[3] == 0x6d5451fdu);

  r = rng::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                      {0xa4093822u, 0x299f31d0u});
  CHECK(r[0] == 0xd16cfe09u);
  CHECK(r[1] == 0x94fdccebu);
  CHECK(r[2] == 0x5001e420u);
  CHECK(r[3] == 0x24126ea1u);
}

TEST_CASE("counter_stream_determinism_and_separation") {
  rng::counter_stream a(7, 11, kStepChannel);
  rng::counter_stream b(7, 11, kStepChannel);
  for (int i = 0; i < 100; ++i) {
    double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }

  // different stream, channel, or seed: different sequences
  rng::counter_stream c(7, 12, kStepChannel);
  rng::counter_stream d(7, 11, kMarkChannel);
  rng::counter_stream e(8, 11, kStepChannel);
  rng::counter_stream base(7, 11, kStepChannel);
  bool all_equal_c = true, all_equal_d = true, all_equal_e = true;
  for (int i = 0; i < 16; ++i) {
    double u = base.uniform();
    all_equal_c = all_equal_c && u == c.uniform();
    all_equal_d = all_equal_d && u == d.uniform();
    all_equal_e = all_equal_e && u == e.uniform();
  }
  CHECK(!all_equal_c);
  CHECK(!all_equal_d);
  CHECK(!all_equal_e);

  rng::counter_stream f(7, 11, kMarkChannel);
  for (int i = 0; i < 50; ++i) CHECK(f.exponential(2.0) > 0.0);
  rng::counter_stream g(7, 11, kHorizonChannel);
  double m = 0.0;
  for (int i = 0; i < 4000; ++i) m += g.normal();
  CHECK(std::abs(m / 4000.0) < 0.1);
}

TEST_CASE("step_model_detects_exact_schemes") {
  problem_spec gbm = load("dw");
  step_model sm = make_step_model(gbm.dyn);
  CHECK(sm.scheme == step_scheme::exact_gbm);
  CHECK(sm.mu == doctest::Approx(0.05));
  CHECK(sm.sigma == doctest::Approx(0.2));
  // exact log-space transition
  double x = 1.3, dt = 0.25, z = -0.7;
  CHECK(sm.advance(x, dt, z) ==
        doctest::Approx(x * std::exp((0.05 - 0.5 * 0.04) * dt +
                                     0.2 * std::sqrt(dt) * z))
            .epsilon(1e-15));

  diffusion_spec bm = line_bm();
  bm.drift = scalar_function::from_expression("0.3");
  step_model smb = make_step_model(bm);
  CHECK(smb.scheme == step_scheme::exact_bm);
  CHECK(smb.advance(0.5, 0.25, 1.0) ==
        doctest::Approx(0.5 + 0.3 * 0.25 + 0.5).epsilon(1e-15));

  diffusion_spec ou = line_bm();
  ou.drift = scalar_function::from_expression("-2*x");
  CHECK(make_step_model(ou).scheme == step_scheme::euler);
}

TEST_CASE("simulate_paths_serial_equals_parallel_bitwise") {
  diffusion_spec d = line_bm();
  path_bundle s = simulate_paths(d, 0.0, 0.05, 2.0, 500, 99, 0, run_mode::serial);
  path_bundle p = simulate_paths(d, 0.0, 0.05, 2.0, 500, 99, 0, run_mode::parallel);
  REQUIRE(s.states.size() == p.states.size());
  CHECK(s.states == p.states);
  CHECK(s.absorbed_step == p.absorbed_step);
}

TEST_CASE("thinning_inclusion_under_shared_marks") {
  // theta1 <= theta2 with one mark set: the slow process's events are a
  // subset of the fast one's, path by path, with no tolerance.
  diffusion_spec d = line_bm();
  const double horizon = 5.0, z_max = 3.0;
  path_bundle paths = simulate_paths(d, 0.0, 0.05, horizon, 10000, 4242);

  auto theta1 = [](double x) { return 1.0 + 1.0 / (1.0 + x * x); };
  auto theta2 = [](double x) { return 1.7 + 1.0 / (1.0 + x * x); };

  std::size_t with_events = 0;
  for (std::size_t i = 0; i < paths.n_paths; ++i) {
    space_time_marks marks = make_marks(horizon, z_max, 4242, i);
    std::vector<double> e1 = thin_events(paths, i, theta1, marks);
    std::vector<double> e2 = thin_events(paths, i, theta2, marks);
    CHECK(std::includes(e2.begin(), e2.end(), e1.begin(), e1.end()));
    if (!e1.empty()) ++with_events;
  }
  CHECK(with_events > 9900);  // rate >= 1 over 5 time units
}

TEST_CASE("thinning_rejects_rate_above_mark_ceiling") {
  diffusion_spec d = line_bm();
  path_bundle paths = simulate_paths(d, 0.0, 0.05, 5.0, 1, 1);
  space_time_marks marks = make_marks(5.0, 3.0, 1, 0);
  auto theta = [](double) { return 5.0; };
  CHECK_THROWS_WITH_AS(thin_events(paths, 0, theta, marks),
                       doctest::Contains("z_max"), std::runtime_error);
}

TEST_CASE("doeblin_coupling_orders_every_step") {
  diffusion_spec d = line_bm();
  coupled_bundle c = doeblin_couple(d, 0.0, 0.4, 0.05, 3.0, 10000, 31415);
  std::size_t merged = 0;
  for (std::size_t i = 0; i < c.lower.n_paths; ++i) {
    for (std::size_t k = 0; k <= c.lower.n_steps; ++k)
      CHECK(c.lower.state(i, k) <= c.upper.state(i, k));
    if (c.merged_step[i] >= 0) {
      ++merged;
      // identical forever after the merge
      for (std::size_t k = static_cast<std::size_t>(c.merged_step[i]);
           k <= c.lower.n_steps; ++k)
        CHECK(c.lower.state(i, k) == c.upper.state(i, k));
    }
  }
  // P(first crossing <= 3) ~ 0.87 for BMs 0.4 apart, less grid-time misses;
  // measured 8104
  CHECK(merged > 7500);
}

TEST_CASE("direct_estimator_matches_linear_oracle") {
  // g(x) = x, constant rate: G g(x) = x lambda / (lambda + beta - mu) = x/3.
  problem_spec p = load("eg2_4_linear");
  mc_options opt;
  opt.n_paths = 20000;
  g_estimates est = estimate_G(p, 1.0, opt);
  CHECK(std::abs(est.direct.value - 1.0 / 3.0) < 3.0 * est.direct.std_error);
  CHECK(std::abs(est.time_changed.value - 1.0 / 3.0) <
        3.0 * est.time_changed.std_error);
  CHECK(est.discrepancy_sigmas() < 4.0);
  CHECK(est.direct.std_error > 0.0);
  CHECK(est.direct.std_error < 0.01);
}

TEST_CASE("policy_with_never_binding_threshold_reproduces_direct") {
  problem_spec p = load("eg2_4_linear");
  mc_options opt;
  opt.n_paths = 5000;
  estimate pol =
      evaluate_policy(p, -std::numeric_limits<double>::infinity(), 1.0, opt);
  estimate dir = estimate_G_direct(p, 1.0, opt);
  CHECK(pol.value == dir.value);  // identical draws, bitwise
  CHECK(pol.std_error == dir.std_error);
}

TEST_CASE("estimates_are_seed_deterministic") {
  problem_spec p = load("eg2_4_linear");
  mc_options opt;
  opt.n_paths = 3000;
  estimate a = estimate_G_direct(p, 1.0, opt);
  estimate b = estimate_G_direct(p, 1.0, opt);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);

  opt.seed = 43;
  estimate c = estimate_G_direct(p, 1.0, opt);
  CHECK(a.value != c.value);

  opt.seed = 42;
  opt.mode = run_mode::serial;
  estimate d = estimate_G_direct(p, 1.0, opt);
  CHECK(a.value == d.value);  // scheduling-independent
}

TEST_CASE("horizon_truncation_is_tracked") {
  problem_spec p = load("eg2_4_linear");
  mc_options opt;
  opt.n_paths = 4000;
  opt.horizon = 0.2;  // rate 1: ~82% of first events arrive later
  estimate e = estimate_G_direct(p, 1.0, opt);
  CHECK(e.unfinished_fraction > 0.5);
  CHECK(e.bias_bound > 0.0);

  mc_options full;
  full.n_paths = 4000;
  estimate f = estimate_G_direct(p, 1.0, full);
  CHECK(f.unfinished_fraction < 1e-6);
  CHECK(e.value < f.value);  // truncation can only lose discounted payoff
}
