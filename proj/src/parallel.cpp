#include "semproc/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace semproc {

int configured_threads() {
  static const int threads = [] {
    if (const char* env = std::getenv("SEMPROC_THREADS")) {
      try {
        const int v = std::stoi(env);
        if (v > 0) return v;
      } catch (...) {
      }
    }
    return omp_get_max_threads();
  }();
  return threads;
}

}  // namespace semproc
