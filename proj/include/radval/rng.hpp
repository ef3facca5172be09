// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace radval {

// SplitMix64 (Steele, Lea, Flood). One named generator for the whole project:
// every random decision flows from a stream derived by hashing (seed, purpose,
// counters), so reruns are bit-exact on any platform and streams for different
// purposes are independent.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n), unbiased (rejection on the top of the range).
    std::uint64_t next_below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
        std::uint64_t v = next_u64();
        while (v > limit) v = next_u64();
        return v % n;
    }

    // Standard normal via Box-Muller; draws two uniforms per call.
    double next_gaussian() {
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t state() const { return state_; }

  private:
    std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// FNV-1a over the purpose tag, then SplitMix64 finalizers over the numeric
// lane indices. Distinct (seed, purpose, a, b) give unrelated streams.
inline SplitMix64 derive_stream(std::uint64_t seed, std::string_view purpose, std::uint64_t a = 0,
                                std::uint64_t b = 0) {
    std::uint64_t state = mix64(seed ^ fnv1a64(purpose));
    state = mix64(state ^ (a + 0x9e3779b97f4a7c15ULL));
    state = mix64(state ^ (b + 0x632be59bd9b4e019ULL));
    return SplitMix64(state);
}

}  // namespace radval
