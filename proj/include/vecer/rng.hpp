#pragma once

#include <array>
#include <cstdint>

#include "vecer/normal.hpp"

namespace vecer {

// Philox4x32-10 counter-based generator.  Each (seed, path, draw) triple maps
// to one 64-bit word with no sequential state, so path i, draw j is the same
// number no matter how paths are scheduled across threads.
namespace philox {

inline constexpr std::uint32_t w32_a = 0x9E3779B9u;  // golden-ratio key bumps
inline constexpr std::uint32_t w32_b = 0xBB67AE85u;
inline constexpr std::uint32_t m4x32_a = 0xD2511F53u;
inline constexpr std::uint32_t m4x32_b = 0xCD9E8D57u;

inline std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t path,
                                          std::uint64_t draw) {
    std::uint32_t c0 = static_cast<std::uint32_t>(path);
    std::uint32_t c1 = static_cast<std::uint32_t>(path >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(draw);
    std::uint32_t c3 = static_cast<std::uint32_t>(draw >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);

    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(m4x32_a) * c0;
        const std::uint64_t p1 = static_cast<std::uint64_t>(m4x32_b) * c2;
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        const std::uint32_t n0 = hi1 ^ c1 ^ k0;
        const std::uint32_t n1 = lo1;
        const std::uint32_t n2 = hi0 ^ c3 ^ k1;
        const std::uint32_t n3 = lo0;
        c0 = n0; c1 = n1; c2 = n2; c3 = n3;
        k0 += w32_a;
        k1 += w32_b;
    }
    return {c0, c1, c2, c3};
}

} // namespace philox

// Bin-centered 52-bit uniform in the open interval (0, 1).  The coarser
// 53-bit variant (bits >> 11) * 2^-53 + 2^-54 is not used because its top
// value 1 - 2^-54 rounds to exactly 1.0, which the quantile rejects; every
// value of this form is representable, so the endpoints stay excluded.
inline double uniform_open01(std::uint64_t bits) {
    return static_cast<double>(bits >> 12) * 0x1.0p-52 + 0x1.0p-53;
}

// Standard normal draw for (seed, path, draw), via the inverse CDF.
inline double normal_draw(std::uint64_t seed, std::uint64_t path,
                          std::uint64_t draw) {
    const auto b = philox::block(seed, path, draw);
    const std::uint64_t word =
        (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
    return normal_quantile(uniform_open01(word));
}

} // namespace vecer
