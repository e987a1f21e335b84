#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace gna {

// Deterministic random number generator used everywhere in the workbench.
//
// "gna-rng v1": xoshiro256** seeded through splitmix64.  The generator and
// every distribution helper below are implemented by hand so that a given
// seed produces the same byte-for-byte stream on every platform and
// standard library.  Independent streams are derived with derive()/split(),
// which mix a stream index through splitmix64 instead of sharing state.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    // Independent stream addressed by (seed, stream).  Used by sweep runners
    // so that run k's randomness does not depend on how many draws run k-1
    // consumed, nor on scheduling order.
    static Rng derive(std::uint64_t seed, std::uint64_t stream);

    // Child generator seeded from this generator's next output.
    Rng split();

    std::uint64_t next_u64();

    // Uniform on [0,1) with 53 random bits.
    double uniform01();

    // Uniform integer in [0, bound), bound > 0.  Unbiased (rejection).
    std::uint64_t below(std::uint64_t bound);

    // Uniform integer in [lo, hi], inclusive.
    std::int64_t int_in(std::int64_t lo, std::int64_t hi);

    // Uniform real in [lo, hi).
    double real_in(double lo, double hi);

    bool chance(double p);  // true with probability p

    // Gaussian via Marsaglia's polar method (one spare cached).
    double normal(double mean, double sd);

    // Index sampled proportionally to non-negative weights (at least one > 0).
    std::size_t weighted(std::span<const double> weights);

private:
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Seed expander, also usable directly for hashing small integer tuples.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace gna
