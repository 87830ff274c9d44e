#pragma once

#include <cstdint>

namespace lrss2d {

// Counter-based pseudo-random generator (splitmix64 output function over a
// seed+counter state). The same seed always yields the same sample stream,
// bit-exact, independent of platform. split() derives an independent child
// stream so parallel benchmark trials stay reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() {
        counter_ += 1;
        return mix(seed_ + counter_ * 0x9E3779B97F4A7C15ull);
    }

    // Uniform double in [0, 1), 53 mantissa bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; pairs are cached.
    double normal();

    // Independent child stream seeded from this stream's next output.
    Rng split() { return Rng(mix(next_u64() ^ 0xD1B54A32D192ED03ull)); }

    std::uint64_t seed() const { return seed_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace lrss2d
