#pragma once

#include <exception>
#include <stdexcept>
#include <string>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qcl {

// Serial reference executor. The parallel path below must produce the same
// results for any thread count: work items own their RNG streams and write
// only to their own slots, so equality is testable directly.
template <typename Fn>
void run_indexed_serial(int count, Fn&& fn) {
  for (int i = 0; i < count; ++i) fn(i);
}

// OpenMP executor over independent work items. threads <= 0 uses the OpenMP
// default; threads == 1 falls back to the serial reference.
template <typename Fn>
void run_indexed(int count, int threads, Fn&& fn) {
  if (count <= 0) return;
#ifdef _OPENMP
  if (threads == 1) {
    run_indexed_serial(count, std::forward<Fn>(fn));
    return;
  }
  std::exception_ptr error;
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (int i = 0; i < count; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical
      {
        if (!error) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
#else
  (void)threads;
  run_indexed_serial(count, std::forward<Fn>(fn));
#endif
}

inline int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace qcl
