#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pstop/paths.hpp"

namespace pstop::mc {

// Unit-rate planar Poisson marks on [0, horizon] x [0, z_max].  An event of
// the intensity-theta(X) process happens at u exactly when some mark (u, z)
// satisfies z <= theta(X_u).  Sharing one mark set across two intensities
// theta1 <= theta2 yields exact event-set inclusion.
struct space_time_marks {
  double horizon = 0.0;
  double z_max = 0.0;
  std::vector<double> u;  // ascending event abscissae
  std::vector<double> z;  // heights, i.i.d. uniform on (0, z_max)
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Deterministic given (seed, stream): abscissae from exponential(z_max)
// spacings, heights from the same counter stream (channel kMarkChannel).
space_time_marks make_marks(double horizon, double z_max, std::uint64_t seed,
                            std::uint64_t stream);

// Event times of the theta(X)-modulated Poisson process along one stored
// path, by thinning.  theta is evaluated at the left grid point of the step
// containing each mark (piecewise-constant intensity).  Throws
// std::runtime_error if theta exceeds marks.z_max anywhere it is evaluated:
// the caller must enlarge z_max and regenerate the marks.
std::vector<double> thin_events(const path_bundle& paths, std::size_t path,
                                const std::function<double(double)>& theta,
                                const space_time_marks& marks);

}  // namespace pstop::mc
