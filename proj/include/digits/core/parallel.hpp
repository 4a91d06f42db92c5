#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace digits {

/// Every data-parallel kernel in the library has an OpenMP path and a plain
/// serial path. The serial path is the reference the tests compare against;
/// both must produce identical integer counts.
enum class Execution { serial, parallel };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Number of indices i in [0, n) for which pred(i) holds.
template <class Pred>
std::size_t count_indices(std::size_t n, Execution exec, Pred&& pred) {
  std::int64_t total = 0;
  const auto len = static_cast<std::int64_t>(n);
  if (exec == Execution::parallel) {
#pragma omp parallel for reduction(+ : total) schedule(static)
    for (std::int64_t i = 0; i < len; ++i) {
      if (pred(static_cast<std::size_t>(i))) ++total;
    }
  } else {
    for (std::int64_t i = 0; i < len; ++i) {
      if (pred(static_cast<std::size_t>(i))) ++total;
    }
  }
  return static_cast<std::size_t>(total);
}

/// Column sums of an n x width 0/1 matrix produced row by row:
/// fill(i, row) writes row i into `row` (size width). Per-thread partial
/// sums are merged after the loop, so the result is independent of the
/// thread count.
template <class Fill>
std::vector<std::size_t> count_columns(std::size_t n, std::size_t width, Execution exec, Fill&& fill) {
  std::vector<std::size_t> totals(width, 0);
  const auto len = static_cast<std::int64_t>(n);
  if (exec == Execution::parallel) {
#pragma omp parallel
    {
      std::vector<std::size_t> local(width, 0);
      std::vector<char> row(width, 0);
#pragma omp for schedule(static)
      for (std::int64_t i = 0; i < len; ++i) {
        fill(static_cast<std::size_t>(i), row);
        for (std::size_t c = 0; c < width; ++c) local[c] += row[c] ? 1 : 0;
      }
#pragma omp critical
      for (std::size_t c = 0; c < width; ++c) totals[c] += local[c];
    }
  } else {
    std::vector<char> row(width, 0);
    for (std::int64_t i = 0; i < len; ++i) {
      fill(static_cast<std::size_t>(i), row);
      for (std::size_t c = 0; c < width; ++c) totals[c] += row[c] ? 1 : 0;
    }
  }
  return totals;
}

}  // namespace digits
