#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace equidist {

/// Pairwise (cascade) summation with a fixed tree shape. The result depends
/// only on the input order, never on how the terms were produced.
template <class T>
T pairwise_sum(std::span<const T> terms) {
    constexpr std::size_t leaf = 8;
    if (terms.empty()) return T{};
    if (terms.size() <= leaf) {
        T acc = terms[0];
        for (std::size_t k = 1; k < terms.size(); ++k) acc += terms[k];
        return acc;
    }
    const std::size_t half = terms.size() / 2;
    return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

template <class T>
T pairwise_sum(const std::vector<T>& terms) {
    return pairwise_sum(std::span<const T>(terms));
}

/// Worker count: explicit value if positive, else EQUIDIST_THREADS, else 1.
inline unsigned resolve_threads(int requested = 0) {
    if (requested > 0) return static_cast<unsigned>(requested);
    if (const char* env = std::getenv("EQUIDIST_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

/// Evaluates f(k) for k in [0, n) into a vector. Each slot is written by
/// exactly one worker, so the output is identical for any thread count.
template <class F>
auto parallel_tabulate(std::size_t n, F&& f, unsigned threads = 1)
    -> std::vector<decltype(f(std::size_t{}))> {
    using value_type = decltype(f(std::size_t{}));
    std::vector<value_type> out(n);
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t k = 0; k < n; ++k) out[k] = f(k);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(threads);
    pool.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&out, &f, &failures, w, lo, hi] {
            try {
                for (std::size_t k = lo; k < hi; ++k) out[k] = f(k);
            } catch (...) {
                failures[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : failures)
        if (e) std::rethrow_exception(e);
    return out;
}

} // namespace equidist
