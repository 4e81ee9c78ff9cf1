#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace bellvqc {

// All randomness descends from one 64-bit master seed. A stream is named by a
// label plus up to three indices, so any evaluation order reproduces the same
// draws.

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

} // namespace detail

struct StreamId {
    std::uint64_t master = 0;
    std::string_view label;
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    std::uint64_t c = 0;
};

[[nodiscard]] constexpr std::uint64_t derive_seed(const StreamId &id) noexcept {
    std::uint64_t h = detail::splitmix64(id.master);
    h = detail::splitmix64(h ^ detail::fnv1a(id.label));
    h = detail::splitmix64(h ^ id.a);
    h = detail::splitmix64(h ^ (id.b + 0x632BE59BD9B4E019ULL));
    h = detail::splitmix64(h ^ (id.c + 0x85157AF5ULL));
    return h;
}

using Engine = std::mt19937_64;

[[nodiscard]] inline Engine make_engine(const StreamId &id) {
    return Engine{derive_seed(id)};
}

/// Uniform double in [0, 1) built from the top 53 bits; identical on every
/// platform, unlike std::uniform_real_distribution.
[[nodiscard]] inline double uniform01(Engine &eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

} // namespace bellvqc
