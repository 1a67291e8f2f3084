#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace csigan {

// splitmix64 finalizer: full-avalanche 64-bit bijection.
inline std::uint64_t mix_bits(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// splitmix64 stream over a mutable state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    return mix_bits(state += 0x9e3779b97f4a7c15ULL);
}

// Derive a stream seed from (master, tag, indices). Each injection is
// followed by the full finalizer, so structured inputs (small integers,
// nearby masters) cannot collide algebraically.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    std::uint64_t s = mix_bits(master + 0x9e3779b97f4a7c15ULL);
    s = mix_bits(s ^ h);
    s = mix_bits(s + 0x9e3779b97f4a7c15ULL * (a + 1));
    s = mix_bits(s + 0x9e3779b97f4a7c15ULL * (b + 1));
    return s;
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

}  // namespace csigan
