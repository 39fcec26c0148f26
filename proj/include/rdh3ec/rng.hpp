// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace rdh3ec {

// Keyed deterministic generator (splitmix64). Every randomized step in the
// pipeline draws from an Rng seeded by Rng::mix of the experiment key and a
// purpose/index tuple, so results are reproducible across platforms and
// independent of library <random> implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, bound), bound > 0. Rejection sampling.
    uint64_t next_below(uint64_t bound) {
        const uint64_t limit = bound * (UINT64_MAX / bound);
        uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

    // Uniform double in [0, 1) with 53 significant bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_unit() < p; }

    uint8_t next_bit() { return static_cast<uint8_t>(next_u64() >> 63); }

    // Seed derivation: feeds each word through the generator so nearby
    // tuples land far apart.
    static uint64_t mix(std::initializer_list<uint64_t> words) {
        Rng r(0x243F6A8885A308D3ull);
        uint64_t acc = 0;
        for (uint64_t w : words) {
            r.state_ ^= w + 0x9E3779B97F4A7C15ull + (acc << 6) + (acc >> 2);
            acc = r.next_u64();
        }
        return acc;
    }

private:
    uint64_t state_;
};

// Fisher-Yates shuffle driven by the keyed generator.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (size_t i = v.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace rdh3ec
