#pragma once

#include <cstddef>
#include <exception>
#include <limits>

namespace meancurve {

/// OpenMP loop over [0, n) that carries exceptions out of the parallel region.
/// When several iterations throw, the one with the lowest index is rethrown.
template <typename Fn>
void parallel_for(std::ptrdiff_t n, Fn&& fn) {
  std::exception_ptr error;
  std::ptrdiff_t error_at = std::numeric_limits<std::ptrdiff_t>::max();
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    try {
      fn(k);
    } catch (...) {
#pragma omp critical(meancurve_parallel_for_error)
      if (k < error_at) {
        error_at = k;
        error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace meancurve
