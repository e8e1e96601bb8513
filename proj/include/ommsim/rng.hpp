#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace ommsim {

// splitmix64 step; the basis for all seed derivation in the project.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stable sub-seed hash: folds each part into the state with splitmix64.
// Used to derive per-cell and per-trial seeds so experiment matrices are
// reproducible across machines and parallelism degrees.
inline std::uint64_t seed_mix(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t state = splitmix64(base);
    for (std::uint64_t p : parts) {
        state = splitmix64(state ^ (p + 0x9e3779b97f4a7c15ULL));
    }
    return state;
}

inline std::uint64_t seed_mix(std::uint64_t base, std::uint64_t a) {
    return seed_mix(base, {a});
}

// Deterministic generator with hand-rolled distributions. std::mt19937_64 is
// bit-specified by the standard; the std distributions are not, so uniform
// draws are implemented here to keep results identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : s_{splitmix64(seed), splitmix64(seed ^ 0xda3e39cb94b95bdbULL)} {
        if (s_[0] == 0 && s_[1] == 0) s_[1] = 1;
    }

    // xoroshiro128++
    std::uint64_t next_u64() {
        const std::uint64_t s0 = s_[0];
        std::uint64_t s1 = s_[1];
        const std::uint64_t result = rotl(s0 + s1, 17) + s0;
        s1 ^= s0;
        s_[0] = rotl(s0, 49) ^ s1 ^ (s1 << 21);
        s_[1] = rotl(s1, 28);
        return result;
    }

    // Uniform integer in [0, bound) via rejection sampling; bound > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform double in [lo, hi).
    double next_double(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(next_below(v.size()))];
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[2];
};

} // namespace ommsim
