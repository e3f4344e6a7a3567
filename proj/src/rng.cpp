#include "dynloc/rng.hpp"

#include <cmath>
#include <numbers>

namespace dynloc {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const
{
    // Three rounds keyed by seed and stream; each round is a bijection.
    std::uint64_t h = splitmix64(seed_ ^ 0x243f6a8885a308d3ULL);
    h = splitmix64(h ^ stream_);
    return splitmix64(h ^ counter);
}

double CounterRng::uniform(std::uint64_t counter) const
{
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

std::pair<double, double> CounterRng::normal_pair(std::uint64_t k) const
{
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform(2 * k);
    const double u2 = uniform(2 * k + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace dynloc
