#include "qoc/threading.hpp"

#include <cstdlib>
#include <string>

namespace qoc {

int scenario_threads() {
  const char* env = std::getenv("QCTRL_THREADS");
  if (env == nullptr || *env == '\0') return omp_get_max_threads();
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || v < 0) return omp_get_max_threads();
  if (v == 0) return omp_get_max_threads();
  return static_cast<int>(v);
}

}  // namespace qoc
