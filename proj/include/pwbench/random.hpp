#pragma once

#include <cstdint>
#include <random>

namespace pwbench {

/// SplitMix64 finalizer, used to derive independent seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for sub-stream `stream` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/**
 * Deterministic PRNG used for every shuffle and sampler in the project.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the
 * standard. Bounded and real draws are implemented here rather than with
 * the standard distributions, whose algorithms vary between library
 * implementations.
 */
class Prng {
public:
    explicit Prng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound); bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

}  // namespace pwbench
