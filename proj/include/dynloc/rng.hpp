#pragma once

#include <cstdint>
#include <utility>

namespace dynloc {

/// Counter-based generator: the k-th draw of stream s under seed is a pure
/// function of (seed, s, k), so trajectories can be sampled in any order or
/// on any thread with identical results.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    std::uint64_t bits(std::uint64_t counter) const;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform(std::uint64_t counter) const;

    /// Two independent standard normals from draws 2k and 2k+1.
    std::pair<double, double> normal_pair(std::uint64_t k) const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace dynloc
