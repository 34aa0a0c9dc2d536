#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace hergo {

// Worker count used by the range-parallel kernels (1 by default).
int default_threads();
void set_default_threads(int n);

// Fixed block width of the summation tree.  Results never depend on the thread count.
inline constexpr int64_t kReduceBlock = 1 << 14;

// Runs body(b) for b in [0, nblocks) on `threads` workers with static striding.
void parallel_blocks(int64_t nblocks, int threads, const std::function<void(int64_t)>& body);

// Pairwise tree over a vector of partial sums.
template <class T>
T tree_reduce(std::vector<T> v) {
    if (v.empty()) return T{};
    while (v.size() > 1) {
        size_t h = (v.size() + 1) / 2;
        for (size_t i = 0; i + h < v.size(); ++i) v[i] = v[i] + v[i + h];
        v.resize(h);
    }
    return v[0];
}

// sum_{i in [lo, hi)} term(i), deterministic for any thread count.
template <class T, class F>
T deterministic_sum(int64_t lo, int64_t hi, F&& term, int threads = default_threads()) {
    if (hi <= lo) return T{};
    int64_t nb = (hi - lo + kReduceBlock - 1) / kReduceBlock;
    std::vector<T> part(nb);
    parallel_blocks(nb, threads, [&](int64_t b) {
        int64_t s = lo + b * kReduceBlock, e = std::min(hi, s + kReduceBlock);
        T acc{};
        for (int64_t i = s; i < e; ++i) acc += term(i);
        part[b] = acc;
    });
    return tree_reduce(std::move(part));
}

}  // namespace hergo
