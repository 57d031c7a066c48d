#pragma once

#include <exception>
#include <utility>

#include <omp.h>

namespace qoc {

/// Worker cap for scenario-parallel loops. Reads QCTRL_THREADS each call;
/// 0, unset, or unparsable means "all available cores".
int scenario_threads();

enum class Execution { serial, parallel };

/// Runs fn(i) for i in [0, n). The parallel path distributes iterations
/// over OpenMP threads; callers that need bitwise-reproducible aggregates
/// must write per-index results and reduce in index order afterwards.
/// The serial path is the reference implementation used by tests and the
/// benchmark to vouch for the parallel one.
template <typename Fn>
void for_each_index(int n, Execution exec, Fn&& fn) {
  if (exec == Execution::serial || n <= 1 || scenario_threads() <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic) num_threads(scenario_threads())
  for (int i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(qoc_for_each_index_error)
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qoc
