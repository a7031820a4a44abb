#pragma once

#include <cstddef>
#include <exception>
#include <limits>

#include <omp.h>

namespace semitoric {

// Selects between the serial reference path and the OpenMP kernel.
struct Execution {
  bool parallel = true;
  int workers = 0;  // 0 means the OpenMP default

  static Execution serial() { return {false, 1}; }
  static Execution threads(int n = 0) { return {true, n}; }

  int thread_count() const {
    if (!parallel) return 1;
    return workers > 0 ? workers : omp_get_max_threads();
  }
};

// Runs body(i) for i in [0, n). Iterations must be independent and write
// only their own slot, so serial and parallel results are identical. If
// several iterations throw, the exception of the lowest index is rethrown,
// which is also what the serial loop would have produced.
template <class Body>
void for_each_index(std::size_t n, const Execution& exec, Body&& body) {
  if (!exec.parallel || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  std::size_t first_index = std::numeric_limits<std::size_t>::max();
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(exec.thread_count())
  for (long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(semitoric_for_each_index)
      {
        if (static_cast<std::size_t>(i) < first_index) {
          first_index = static_cast<std::size_t>(i);
          first = std::current_exception();
        }
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace semitoric
