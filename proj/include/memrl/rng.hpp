#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace memrl {

/**
 * Counter-based, splittable random stream.
 *
 * Every draw is a pure function of (key, counter), so a stream can be
 * reproduced from its seed alone and child streams derived with split()
 * are independent of how many values the parent has already produced.
 * Satisfies UniformRandomBitGenerator so it can drive <random> if needed,
 * although the samplers below avoid std distributions to stay bit-stable
 * across standard library implementations.
 */
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0);

    /// Child stream keyed by `stream`; does not advance this stream.
    Rng split(std::uint64_t stream) const;

    std::uint64_t next_u64();
    result_type operator()() { return next_u64(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal via Box-Muller (consumes two draws).
    double normal();
    /// Index drawn from an unnormalized nonnegative weight vector.
    std::size_t categorical(std::span<const double> weights);

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

private:
    Rng(std::uint64_t key, std::uint64_t counter) : key_(key), counter_(counter) {}

    std::uint64_t key_;
    std::uint64_t counter_;
};

} // namespace memrl
