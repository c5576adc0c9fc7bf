#include "fracfb/runtime.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace fracfb {

namespace {
std::atomic<int> g_thread_cap{1};
}

void set_thread_cap(int k) {
    g_thread_cap.store(std::max(1, k));
}

int thread_cap() {
    return g_thread_cap.load();
}

void parallel_for(long n, const std::function<void(long, long)>& fn) {
    const int cap = std::min<long>(thread_cap(), std::max<long>(1, n));
    if (cap <= 1 || n < 256) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(cap));
    const long chunk = (n + cap - 1) / cap;
    for (int t = 0; t < cap; ++t) {
        const long b = t * chunk;
        const long e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

} // namespace fracfb
