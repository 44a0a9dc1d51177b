#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace affsel::detail {

// Deterministic helpers on top of mt19937_64. The standard distributions and
// std::shuffle are implementation-defined bit-for-bit, which would break the
// byte-identical-outputs contract across toolchains, so the draws are spelled
// out here.

inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    return rng() % n;  // bias ~2^-60 for the small n used here
}

// Uniform double in [0,1) with 53 random bits.
inline double canonical(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class T>
void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[bounded(rng, i)]);
}

} // namespace affsel::detail
