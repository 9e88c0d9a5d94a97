// Serial versus OpenMP timing for the Monte Carlo kernels.  The parallel
// kernels must reproduce the serial results bit for bit (counter-based
// streams, fixed-order reduction); this tool measures the speedup and
// asserts the equality.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "pstop/estimators.hpp"
#include "pstop/paths.hpp"
#include "pstop/problem.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace pstop;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

problem_spec gbm_problem() {
  problem_spec p;
  p.name = "bench";
  p.beta = 0.1;
  p.dyn.drift = scalar_function::from_expression("0.05*x");
  p.dyn.vol = scalar_function::from_expression("0.2*x");
  p.dyn.domain = {0.0, std::numeric_limits<double>::infinity(),
                  endpoint_kind::natural, endpoint_kind::natural};
  p.payoff = scalar_function::from_expression("max(x-1,0)");
  p.rate = scalar_function::from_expression("1");
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n_paths = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200000;
  problem_spec p = gbm_problem();

  mc::mc_options opt;
  opt.n_paths = n_paths;
  opt.dt = 0.01;
  opt.horizon = 40.0;
  opt.seed = 42;

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif
  std::printf("paths: %zu  dt: %g  horizon: %g\n\n", n_paths, opt.dt, opt.horizon);

  struct row {
    const char* name;
    mc::estimate serial, parallel;
    double t_serial, t_parallel;
  };
  row rows[2];

  opt.mode = pstop::mc::run_mode::serial;
  auto t0 = std::chrono::steady_clock::now();
  rows[0].serial = mc::estimate_G_direct(p, 1.0, opt);
  rows[0].t_serial = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  rows[1].serial = mc::estimate_G_time_changed(p, 1.0, opt);
  rows[1].t_serial = seconds_since(t0);

  opt.mode = pstop::mc::run_mode::parallel;
  t0 = std::chrono::steady_clock::now();
  rows[0].parallel = mc::estimate_G_direct(p, 1.0, opt);
  rows[0].t_parallel = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  rows[1].parallel = mc::estimate_G_time_changed(p, 1.0, opt);
  rows[1].t_parallel = seconds_since(t0);

  rows[0].name = "estimate_G_direct";
  rows[1].name = "estimate_G_time_changed";

  std::printf("%-24s %12s %12s %8s %s\n", "kernel", "serial [s]", "parallel [s]",
              "speedup", "bitwise");
  bool all_equal = true;
  for (const row& r : rows) {
    bool equal = r.serial.value == r.parallel.value &&
                 r.serial.std_error == r.parallel.std_error;
    all_equal = all_equal && equal;
    std::printf("%-24s %12.3f %12.3f %7.2fx %s\n", r.name, r.t_serial,
                r.t_parallel, r.t_serial / r.t_parallel, equal ? "yes" : "NO");
    std::printf("%-24s value=%.17g se=%.3g\n", "", r.serial.value,
                r.serial.std_error);
  }
  if (!all_equal) {
    std::printf("\nserial and parallel results differ\n");
    return 1;
  }
  return 0;
}
