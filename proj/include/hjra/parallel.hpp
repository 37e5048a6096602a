#ifndef HJRA_PARALLEL_HPP
#define HJRA_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace hjra {

// Worker count used by node-parallel loops. 1 by default; the CLI sets it
// from --threads.
int worker_count();
void set_worker_count(int n);

// Splits [0, n) into one contiguous chunk per worker and runs fn(begin, end)
// on each. Every index is handled by exactly one worker; callers must write
// disjoint per-index outputs only, which keeps results independent of the
// worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace hjra

#endif
