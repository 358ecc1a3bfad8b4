// Counter-seeded random streams. Every consumer derives its own stream from
// (root seed, stream id), so sampling order never depends on scheduling.
#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace phonolab {

inline std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) {
        state_ = seed ^ 0x5851f42d4c957f2dull;
        (void)splitmix64(state_);
        state_ ^= stream * 0xda942042e4dd58b5ull;
        (void)splitmix64(state_);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in (0,1].
    double uniform_open0() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53;
    }

    // Uniform in [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1p-53; }

    // Independent standard normal pair (Box-Muller; fully specified so the
    // byte stream is reproducible across platforms).
    std::pair<double, double> gaussian_pair() {
        double r = std::sqrt(-2.0 * std::log(uniform_open0()));
        double phi = 6.283185307179586476925286766559 * uniform();
        return {r * std::cos(phi), r * std::sin(phi)};
    }

private:
    std::uint64_t state_;
};

}  // namespace phonolab
