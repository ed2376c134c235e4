// Index-parallel loops with a fixed worker count. Each index is written by
// exactly one worker, so results never depend on the thread count.
#ifndef ARCUBE_PARALLEL_HPP
#define ARCUBE_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace arcube {

/// Worker count from ARCUBE_THREADS (unset or 0 = hardware concurrency).
unsigned default_thread_count();

/// `requested` if nonzero, else default_thread_count().
unsigned resolve_thread_count(unsigned requested);

/// Calls body(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any body is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace arcube

#endif  // ARCUBE_PARALLEL_HPP
