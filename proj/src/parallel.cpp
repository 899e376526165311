#include "mixreg/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

namespace mixreg {

int worker_threads() {
  int threads = omp_get_max_threads();
  if (const char* env = std::getenv("MIXREG_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap > 0) threads = std::min(threads, cap);
    } catch (const std::exception&) {
      // ignored: malformed values leave the OpenMP default in place
    }
  }
  return std::max(threads, 1);
}

}  // namespace mixreg
