#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace wdl {

// Portable seedable generator. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard, so trajectories are bit-identical
// across platforms. Uniform and normal variates are derived with explicit
// transforms (53-bit mantissa scaling, Box-Muller) rather than the
// implementation-defined std:: distributions.
//
// Algorithm identifier (echoed in run manifests): see Rng::kAlgorithm.
class Rng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64/u53/box-muller:v1";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Standard normal via Box-Muller. Consumes two engine draws; the second
    // variate of the pair is discarded so the stream layout stays simple.
    double normal() {
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

private:
    std::mt19937_64 engine_;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

// Derives a child seed from a master seed and a path of stream ids, e.g.
// derive_seed(master, {n, rep, purpose}). Disjoint paths give independent
// streams; the mapping is fixed so experiments are replayable.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = detail::splitmix64(master);
    for (std::uint64_t p : path) {
        s = detail::splitmix64(s ^ detail::splitmix64(p + 0x632be59bd9b4e019ULL));
    }
    return s;
}

}  // namespace wdl
