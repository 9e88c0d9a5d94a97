#include "pstop/marks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pstop/expr.hpp"

namespace pstop::mc {

space_time_marks make_marks(double horizon, double z_max, std::uint64_t seed,
                            std::uint64_t stream) {
  if (!(horizon > 0.0) || !(z_max > 0.0))
    throw std::invalid_argument("make_marks: horizon and z_max must be positive");
  space_time_marks m;
  m.horizon = horizon;
  m.z_max = z_max;
  m.seed = seed;
  m.stream = stream;
  rng::counter_stream cs(seed, stream, kMarkChannel);
  double t = cs.exponential(z_max);
  while (t < horizon) {
    m.u.push_back(t);
    m.z.push_back(cs.uniform() * z_max);
    t += cs.exponential(z_max);
  }
  return m;
}

std::vector<double> thin_events(const path_bundle& paths, std::size_t path,
                                const std::function<double(double)>& theta,
                                const space_time_marks& marks) {
  if (path >= paths.n_paths)
    throw std::invalid_argument("thin_events: path index out of range");
  std::vector<double> events;
  const double* row = paths.path(path);
  double t_end = double(paths.n_steps) * paths.dt;
  for (std::size_t k = 0; k < marks.u.size(); ++k) {
    double u = marks.u[k];
    if (u >= t_end) break;
    auto step = std::size_t(u / paths.dt);
    if (step > paths.n_steps) step = paths.n_steps;
    double rate = theta(row[step]);
    if (rate > marks.z_max)
      throw std::runtime_error(
          "thin_events: intensity " + format_double(rate) + " exceeds z_max " +
          format_double(marks.z_max) + "; enlarge z_max and regenerate marks");
    if (marks.z[k] <= rate) events.push_back(u);
  }
  return events;
}

}  // namespace pstop::mc
