#ifndef QUADTWIST_PARALLEL_HPP
#define QUADTWIST_PARALLEL_HPP

#include <cstddef>
#include <thread>
#include <vector>

namespace quadtwist
{

inline constexpr const char *thread_env_var = "QUADTWIST_THREADS";

// Thread count: explicit request if positive, else the environment override,
// else the machine parallelism.
int resolve_threads(int requested = 0);

// Evaluates f(i) for i < n into a vector. Work is split in contiguous blocks,
// so each slot is computed exactly once regardless of the thread count.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, F &&f, int threads = 0)
{
    std::vector<T> out(n);
    int nt = resolve_threads(threads);
    if (nt <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = f(i);
        }
        return out;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) {
            break;
        }
        pool.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) {
                out[i] = f(i);
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
    return out;
}

// Pairwise sum with a fixed tree shape determined only by the length.
template <typename T>
T tree_sum(const std::vector<T> &v, std::size_t lo, std::size_t hi)
{
    if (hi <= lo) {
        return T{};
    }
    if (hi - lo <= 8) {
        T acc{};
        for (std::size_t i = lo; i < hi; ++i) {
            acc += v[i];
        }
        return acc;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    return tree_sum(v, lo, mid) + tree_sum(v, mid, hi);
}

template <typename T>
T tree_sum(const std::vector<T> &v)
{
    return tree_sum(v, 0, v.size());
}

} // namespace quadtwist

#endif
