#include "hergo/reduce.hpp"

#include <atomic>

namespace hergo {

namespace {
std::atomic<int> g_threads{1};
}

int default_threads() { return g_threads.load(); }
void set_default_threads(int n) { g_threads.store(std::max(1, n)); }

void parallel_blocks(int64_t nblocks, int threads, const std::function<void(int64_t)>& body) {
    threads = std::max(1, std::min<int>(threads, static_cast<int>(std::min<int64_t>(nblocks, 256))));
    if (threads == 1) {
        for (int64_t b = 0; b < nblocks; ++b) body(b);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            for (int64_t b = w; b < nblocks; b += threads) body(b);
        });
    for (auto& t : pool) t.join();
}

}  // namespace hergo
