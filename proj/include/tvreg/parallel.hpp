#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace tvreg {

/// Number of OpenMP workers used by the parallel kernels.
///
/// Defaults to the OpenMP maximum, capped by the TVREG_THREADS environment
/// variable when it holds a positive integer. set_worker_count() overrides
/// both for the rest of the process (0 restores the default).
int worker_count();
void set_worker_count(int workers);

/// RAII override of the worker count, restoring the previous value on exit.
class ScopedWorkers {
 public:
  explicit ScopedWorkers(int workers);
  ~ScopedWorkers();
  ScopedWorkers(const ScopedWorkers&) = delete;
  ScopedWorkers& operator=(const ScopedWorkers&) = delete;

 private:
  int previous_;
};

/// Runs body(i) for i in [0, count) across worker_count() OpenMP threads.
/// Each index is processed by exactly one thread, so results written per
/// index do not depend on the worker count. If any call throws, the
/// exception from the smallest failing index is rethrown after the loop.
/// Inside an enclosing parallel region the loop runs serially.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  const int workers = worker_count();
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<long long>(count);
#pragma omp parallel for num_threads(workers) schedule(dynamic, 8) if (workers > 1 && !omp_in_parallel())
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace tvreg
