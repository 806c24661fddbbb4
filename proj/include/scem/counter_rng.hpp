#pragma once

#include <cstdint>

namespace scem {

/// Counter-based uniform random numbers. Every draw is a pure function of
/// (seed, stream, step, slot), so particle updates give identical results
/// whatever order or thread they run in.
class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t seed) : seed_(seed) {}

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t bits(std::uint64_t stream, std::uint64_t step, std::uint64_t slot) const {
        std::uint64_t h = mix(seed_);
        h = mix(h ^ stream);
        h = mix(h ^ (step * 0x632be59bd9b4e019ULL));
        h = mix(h ^ (slot * 0x8cb92ba72f3d8dd7ULL));
        return h;
    }

    /// Uniform in [0, 1).
    constexpr double uniform(std::uint64_t stream, std::uint64_t step, std::uint64_t slot) const {
        return static_cast<double>(bits(stream, step, slot) >> 11) * 0x1.0p-53;
    }

    constexpr std::uint64_t seed() const { return seed_; }

    /// Seed for a derived realization, distinct per index.
    static constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
        return mix(mix(master) ^ mix(index + 0x5851f42d4c957f2dULL));
    }

private:
    std::uint64_t seed_;
};

}  // namespace scem
