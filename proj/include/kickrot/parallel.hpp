#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace kr {

// Number of worker threads used by parallel_for (0 selects hardware concurrency).
void set_worker_count(unsigned n);
unsigned worker_count();

// Calls fn(begin, end) on disjoint chunks covering [0, n).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

// Pairwise sum with a fixed tree shape, so the result does not depend on threading.
double pairwise_sum(std::span<const double> v);

}  // namespace kr
