#pragma once

#include <cstddef>
#include <functional>

namespace etaforge {

/// Worker cap: ETAFORGE_THREADS when set, hardware concurrency otherwise.
std::size_t max_threads();

/// Runs fn(i) for i in [0, count).  Work is split into contiguous blocks
/// over at most max_threads() workers; results must be written to
/// disjoint slots so reductions stay deterministic (callers reduce in
/// index order afterwards).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace etaforge
