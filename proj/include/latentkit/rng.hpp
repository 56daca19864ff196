#pragma once

#include <cstdint>

namespace latentkit {

// Counter-based generator: every draw is addressed by (seed, stream,
// counter), so any subset of a stream can be reproduced without generating
// the draws before it. Mixing is the SplitMix64 finalizer applied twice.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

    std::uint64_t bits(std::uint64_t counter) const;
    // Uniform on [0, 1).
    double uniform(std::uint64_t counter) const;
    // Uniform on (lo, hi).
    double uniform(std::uint64_t counter, double lo, double hi) const;
    // Standard normal via Box-Muller; consumes counters 2c and 2c+1 of a
    // dedicated sub-stream, so normal and uniform draws never collide.
    double normal(std::uint64_t counter) const;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    CounterRng substream(std::uint64_t s) const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

} // namespace latentkit
