#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace willmore {

// Fixed-order pairwise summation; the result does not depend on threading.
double pairwise_sum(std::span<const double> values);
double mean(std::span<const double> values);

// Runs body(i) for i in [0, n). Work is split into contiguous blocks; the
// caller must make body(i) write only to slot i for deterministic output.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& body);

// Threads requested by the caller, clamped to [1, hardware].
int resolve_threads(int requested);

}  // namespace willmore
