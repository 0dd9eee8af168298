// Seedable, portable randomness. mt19937_64 output is fixed by the
// standard; the mappings below avoid std::uniform_*_distribution, whose
// results differ across standard libraries. Run seeds are derived from the
// base seed by splitmix64 steps over (instance tag, variant, run index),
// which keeps the per-run streams disjoint.
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fairtt {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view instance_tag,
                                 std::uint64_t variant_tag, std::uint64_t run_index) {
    std::uint64_t s = splitmix64(base ^ fnv1a64(instance_tag));
    s = splitmix64(s ^ (variant_tag + 1));
    return splitmix64(s ^ (run_index + 1));
}

// Uniform integer in [0, n), n >= 1, by rejection on the top range.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_real(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace fairtt
