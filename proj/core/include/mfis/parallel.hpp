// Deterministic work splitting. Loops hand out contiguous index blocks whose
// boundaries depend only on the problem size, and reductions combine per-block
// partials in block order, so results are bit-identical for any thread count.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace mfis {

// Current thread cap (>= 1). Defaults to std::thread::hardware_concurrency().
int max_threads();
void set_max_threads(int n);

struct IndexRange {
  std::int64_t begin = 0, end = 0;
};

// Split [0,n) into blocks of at most `grain` items. Pure function of (n, grain).
std::vector<IndexRange> split_blocks(std::int64_t n, std::int64_t grain);

// Run body(block_index) for every block, possibly concurrently. Blocks write
// only their own slots; callers reduce per-block results afterwards in index
// order when a reduction is needed.
void parallel_run(std::size_t n_blocks, const std::function<void(std::size_t)>& body);

// Convenience: chunked loop over [0,n) with body(begin, end).
void parallel_for(std::int64_t n, std::int64_t grain,
                  const std::function<void(std::int64_t, std::int64_t)>& body);

}  // namespace mfis
