#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace hilasso {

/// SplitMix64 finalizer applied to x + 0x9E3779B97F4A7C15.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Deterministic random source with a fully pinned output sequence.
///
/// The engine is std::mt19937_64 (its output is fixed by the C++ standard).
/// Derived draws avoid the standard distributions, whose algorithms are
/// implementation defined:
///   uniform()    (engine() >> 11) * 2^-53, in [0, 1)
///   normal()     Box-Muller on two uniforms u1, u2:
///                sqrt(-2 ln(1 - u1)) * cos(2 pi u2); the sine branch is
///                not used, so every normal consumes two engine outputs
///   below(n)     rejection sampling: draw engine() until it falls under
///                the largest multiple of n, return value mod n
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform();
    double normal();
    std::uint64_t below(std::uint64_t n);

    /// `count` distinct values from [0, n), in draw order (partial
    /// Fisher-Yates over 0..n-1).
    std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n, std::uint64_t count);

private:
    std::mt19937_64 engine_;
};

} // namespace hilasso
