// Process-wide thread cap and a deterministic block-parallel map helper.
#pragma once

#include <functional>

namespace fracfb {

// Caps internal parallelism (set from the CLI --threads flag). Default 1.
void set_thread_cap(int k);
int thread_cap();

// Runs fn(begin, end) over disjoint index blocks, possibly on several
// threads. Results must be written to disjoint locations; reductions are
// left to the caller so output stays independent of the thread count.
void parallel_for(long n, const std::function<void(long, long)>& fn);

} // namespace fracfb
