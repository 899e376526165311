#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>

namespace mixreg {

/// Every Monte Carlo kernel runs either as a plain loop (the reference
/// implementation) or as an OpenMP loop over trials.
enum class Execution { Serial, Parallel };

/// Trials per chunk in parallel reductions. Chunk boundaries and merge order
/// do not depend on the thread count, so parallel results are reproducible
/// bit for bit on any machine.
inline constexpr std::size_t kTrialChunk = 16;

/// Thread count for parallel kernels: the OpenMP default, capped by the
/// MIXREG_THREADS environment variable when it is set to a positive integer.
int worker_threads();

/// Calls body(i) for i in [0, count). Bodies must only write to slots owned
/// by index i.
template <class Body>
void for_each_index(std::size_t count, Execution exec, Body&& body) {
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const long n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_threads())
  for (long i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
}

/// Folds body(acc, i) over i in [0, count).
///
/// Serial: one accumulator, indices in order. Parallel: fixed chunks of
/// kTrialChunk indices, each folded into a fresh accumulator from init(),
/// then merged into the result in chunk order. The two paths agree up to
/// floating-point reassociation.
template <class Acc, class Init, class Body, class Merge>
Acc reduce_indices(std::size_t count, Execution exec, Init&& init, Body&& body, Merge&& merge) {
  Acc total = init();
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < count; ++i) body(total, i);
    return total;
  }
  const long chunks = static_cast<long>((count + kTrialChunk - 1) / kTrialChunk);
#pragma omp parallel for ordered schedule(static, 1) num_threads(worker_threads())
  for (long c = 0; c < chunks; ++c) {
    Acc local = init();
    const std::size_t lo = static_cast<std::size_t>(c) * kTrialChunk;
    const std::size_t hi = std::min(count, lo + kTrialChunk);
    for (std::size_t i = lo; i < hi; ++i) body(local, i);
#pragma omp ordered
    merge(total, std::move(local));
  }
  return total;
}

}  // namespace mixreg
