#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace gfb {

// static block split, so results never depend on scheduling
template <class F>
void parallel_for(size_t n, int threads, F&& fn) {
    size_t k = static_cast<size_t>(std::max(1, threads));
    k = std::min(k, std::max<size_t>(1, n / 64));
    if (k <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(k);
    for (size_t t = 0; t < k; ++t) {
        pool.emplace_back([&, t] {
            size_t lo = n * t / k, hi = n * (t + 1) / k;
            try {
                for (size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

} // namespace gfb
