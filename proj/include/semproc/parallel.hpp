#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace semproc {

// serial is the reference path; parallel distributes independent iterations
// over OpenMP threads. Both produce identical results because every iteration
// writes only its own output slot.
enum class Exec { serial, parallel };

// Thread count from SEMPROC_THREADS (read once), else the OpenMP default.
int configured_threads();

template <class F>
void parallel_for(std::size_t count, Exec exec, F&& body) {
  if (exec == Exec::serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
  const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(configured_threads())
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace semproc
