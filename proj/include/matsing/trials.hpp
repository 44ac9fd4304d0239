#pragma once

#include <cstdint>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace matsing {

enum class Execution { serial, parallel };

/// Runs fn(trial) for trial = 0..trials-1 and returns the results in trial order.
///
/// The parallel path distributes trials over OpenMP threads. Results land in a
/// preallocated slot per trial, so any later reduction that walks the vector in
/// order gives the same answer for every thread count. The first exception
/// thrown by any trial is rethrown after the loop.
template <class Fn>
auto map_trials(std::int64_t trials, Fn&& fn, Execution exec = Execution::parallel)
    -> std::vector<decltype(fn(std::int64_t{}))> {
  using Result = decltype(fn(std::int64_t{}));
  std::vector<Result> results(static_cast<std::size_t>(trials > 0 ? trials : 0));
  if (exec == Execution::serial) {
    for (std::int64_t t = 0; t < trials; ++t) results[static_cast<std::size_t>(t)] = fn(t);
    return results;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < trials; ++t) {
    try {
      results[static_cast<std::size_t>(t)] = fn(t);
    } catch (...) {
#pragma omp critical(matsing_trial_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

/// Sets the OpenMP thread count; values below 1 leave the runtime default.
inline void set_thread_count(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

inline int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace matsing
