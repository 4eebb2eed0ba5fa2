#pragma once

#include <cmath>
#include <cstdint>

// Counter-based random streams. Every draw is a pure function of
// (seed, session, purpose, indices), so traces are reproducible
// bit-for-bit regardless of evaluation order or thread count.

namespace confgraph::rng {

constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t chain(std::uint64_t h, std::uint64_t x) {
    return mix(h ^ x);
}

constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a,
                                     std::uint64_t b = 0, std::uint64_t c = 0,
                                     std::uint64_t d = 0) {
    std::uint64_t h = mix(seed);
    h = chain(h, a);
    h = chain(h, b);
    h = chain(h, c);
    h = chain(h, d);
    return h;
}

// 53-bit uniform in [0,1).
constexpr double to_unit(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline double uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                      std::uint64_t c = 0, std::uint64_t d = 0) {
    return to_unit(counter_hash(seed, a, b, c, d));
}

// Standard normal via Box-Muller on two sub-draws of the same counter.
inline double normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                     std::uint64_t c = 0, std::uint64_t d = 0) {
    const std::uint64_t h = counter_hash(seed, a, b, c, d);
    double u1 = to_unit(mix(h ^ 0x5bf03635aebcd6a1ULL));
    const double u2 = to_unit(mix(h ^ 0xd72f0a3b86c42b8dULL));
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

// Poisson by CDF inversion; fine for the small rates used here.
inline int poisson(double lambda, double u) {
    if (lambda <= 0.0) return 0;
    double pk = std::exp(-lambda);
    double cdf = pk;
    int x = 0;
    while (u > cdf && x < 4096) {
        ++x;
        pk *= lambda / x;
        cdf += pk;
    }
    return x;
}

// Purposes keep the per-session substreams disjoint.
enum class Draw : std::uint64_t {
    traffic = 1,
    backoff = 2,
    sense = 3,
    fade = 4,
    collision = 5,
    noncomp = 6,
    arrival = 7,
};

struct SessionRng {
    std::uint64_t seed = 0;
    std::uint64_t t = 0;

    double uniform(Draw purpose, std::uint64_t a = 0, std::uint64_t b = 0) const {
        return rng::uniform(seed, t, static_cast<std::uint64_t>(purpose), a, b);
    }
};

// Derives independent sub-seeds (per trial, per topology, ...).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    return counter_hash(master, 0xfeedbead00ULL + tag, a, b, c);
}

}  // namespace confgraph::rng
