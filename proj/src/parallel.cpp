#include "pv/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace pv {

unsigned thread_budget() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PATCHVORTEX_THREADS")) {
        try {
            long v = std::stol(env);
            if (v >= 1) return std::min<unsigned>(static_cast<unsigned>(v), 256u);
        } catch (...) {
            // fall through to hardware default on unparsable values
        }
    }
    return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    unsigned workers = thread_budget();
    if (n == 0) return;
    if (workers <= 1 || n < 2048) {
        body(0, n);
        return;
    }
    workers = std::min<std::size_t>(workers, n);
    std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

} // namespace pv
