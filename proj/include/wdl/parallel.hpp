#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wdl {

// jobs == 0 means "use all hardware threads"; jobs == 1 is the serial path.
inline int resolve_jobs(int jobs) {
#ifdef _OPENMP
    if (jobs <= 0) return omp_get_max_threads();
    return jobs;
#else
    (void)jobs;
    return 1;
#endif
}

inline constexpr std::size_t kSumBlock = 4096;

// Deterministic blocked sum: the range is cut into fixed blocks, block
// partials are accumulated serially within each block and then combined in
// block order. The result is bitwise identical for any thread count,
// including the serial path.
template <typename TermFn>
double blocked_sum(std::size_t n, int jobs, TermFn term) {
    if (n == 0) return 0.0;
    const std::size_t nblocks = (n + kSumBlock - 1) / kSumBlock;
    std::vector<double> partial(nblocks, 0.0);
    const int threads = resolve_jobs(jobs);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && nblocks > 1)
#endif
    for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kSumBlock;
        const std::size_t hi = lo + kSumBlock < n ? lo + kSumBlock : n;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[static_cast<std::size_t>(b)] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

// Serial reference for blocked_sum, kept for testing the parallel kernel.
template <typename TermFn>
double blocked_sum_serial(std::size_t n, TermFn term) {
    if (n == 0) return 0.0;
    const std::size_t nblocks = (n + kSumBlock - 1) / kSumBlock;
    double total = 0.0;
    for (std::size_t b = 0; b < nblocks; ++b) {
        const std::size_t lo = b * kSumBlock;
        const std::size_t hi = lo + kSumBlock < n ? lo + kSumBlock : n;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        total += s;
    }
    return total;
}

// Plain left-to-right sum; used by the benchmark as the naive baseline.
template <typename TermFn>
double plain_sum_serial(std::size_t n, TermFn term) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += term(i);
    return s;
}

// Parallel index loop for independent work items (e.g. Monte-Carlo
// replications). Each item writes only to its own slot, so results do not
// depend on the schedule.
template <typename BodyFn>
void parallel_for_index(std::size_t n, int jobs, BodyFn body) {
    const int threads = resolve_jobs(jobs);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (threads > 1)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        body(static_cast<std::size_t>(i));
    }
}

}  // namespace wdl
