#include "latentkit/rng.hpp"

#include <cmath>
#include <numbers>

namespace latentkit {

namespace {

inline std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;

} // namespace

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
    return mix(mix(seed_ + golden * (stream_ + 1)) + golden * counter + 1);
}

double CounterRng::uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
}

double CounterRng::normal(std::uint64_t counter) const {
    const CounterRng sub = substream(0x6e6f726dULL); // keep normals off the uniform stream
    const double u1 = (static_cast<double>(sub.bits(2 * counter) >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(sub.bits(2 * counter + 1) >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

CounterRng CounterRng::substream(std::uint64_t s) const {
    return CounterRng(seed_, mix(stream_ + golden * (s + 1)));
}

} // namespace latentkit
