#pragma once

#include <cstddef>
#include <vector>

namespace pstop::mc {

// Pairwise sum in fixed index order.  Splitting on index rather than on
// accumulation order makes the result independent of how the terms were
// produced (serial or parallel), so estimators can promise bitwise
// reproducibility.
inline double pairwise_sum(const double* data, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

}  // namespace pstop::mc
