#pragma once

#include <cstdint>
#include <random>

namespace cachecast {

// splitmix64 finalizer; used for seed derivation so that sub-streams are
// decorrelated even for adjacent seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t seed_combine(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b));
}

// Thin wrapper over mt19937_64 with portable bounded draws.  The standard
// distributions are implementation-defined, so sampling goes through these
// helpers to keep realizations bit-identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    // Uniform double in [0, 1) with 53 bits of entropy.
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 eng_;
};

}  // namespace cachecast
