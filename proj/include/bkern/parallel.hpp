#pragma once

// OpenMP loop helpers. Every parallel kernel in the library has a serial
// counterpart selected by Execution::Serial; tests check they agree and
// bench_kernels times them against each other.

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace bkern {

enum class Execution { Serial, Parallel };

// Static-schedule loop over [0, n). Exceptions thrown by fn are captured and
// the first one is rethrown after the loop (an exception escaping an OpenMP
// region terminates the process).
template <class Fn>
void parallel_for(std::ptrdiff_t n, Fn&& fn, Execution exec = Execution::Parallel) {
  if (exec == Execution::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex m;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(m);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

inline int thread_count() { return omp_get_max_threads(); }

}  // namespace bkern
