#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>

namespace qslab {

std::uint64_t splitmix64(std::uint64_t x);

// Stream seed for a work item: depends only on the base seed and the item's key.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::int64_t> key);

// Worker count: explicit value if positive, else QSLAB_WORKERS, else 1.
int resolve_workers(int requested);

// Runs body(i) for i in [0, n) on `workers` threads. Items are claimed dynamically;
// callers write results by index so output never depends on scheduling.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

}  // namespace qslab
