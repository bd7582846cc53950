#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace cseer {

// Runs fn(i) for i in [0, count), split into contiguous chunks across
// worker threads when threads > 1. fn must only touch state owned by its
// own index so results stay deterministic regardless of thread count.
template <class Fn>
void parallel_for(long count, int threads, Fn&& fn) {
    if (count <= 0) return;
    if (threads <= 1 || count == 1) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }
    long workers = std::min<long>(threads, count);
    long chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (long w = 0; w < workers; ++w) {
        long begin = w * chunk;
        long end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &fn] {
            for (long i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace cseer
