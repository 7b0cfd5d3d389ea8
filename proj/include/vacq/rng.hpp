#pragma once

#include <cmath>
#include <cstdint>

namespace vacq {

// Counter-based generator with O(1) random access. value(i) hashes
// state0 + (i+1)*GAMMA through the splitmix64 finalizer, so a draw for
// customer i can be produced without generating draws 0..i-1. Streams
// derived from the same seed with distinct stream ids are statistically
// independent for any realistic path length.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : state0_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    // 64-bit value at counter position i.
    std::uint64_t value(std::uint64_t i) const {
        return mix(state0_ + (i + 1) * GAMMA);
    }

    // uniform in [0, 1), 53 usable bits
    double uniform(std::uint64_t i) const {
        return static_cast<double>(value(i) >> 11) * 0x1.0p-53;
    }

    // derive a child seed (used to give each replication its own streams)
    std::uint64_t child(std::uint64_t i) const { return value(i); }

private:
    static constexpr std::uint64_t GAMMA = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state0_;
};

}  // namespace vacq
