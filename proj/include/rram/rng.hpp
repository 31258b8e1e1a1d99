#pragma once

// Counter-based random streams.
//
// A stream is identified by a key built from (base seed, trial, device,
// parameter id); the n-th output of the stream is a pure function of
// (key, n). Draws therefore do not depend on the order in which trials or
// devices are visited, nor on thread scheduling.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rram {

/// SplitMix64 finaliser: a bijective 64-bit mixing function.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Folds `value` into `key`. Not commutative: (a, b) and (b, a) give different keys.
constexpr std::uint64_t combine(std::uint64_t key, std::uint64_t value) {
    return mix64(key ^ mix64(value + 0x9e3779b97f4a7c15ull));
}

class CounterRng {
public:
    using result_type = std::uint64_t;

    constexpr explicit CounterRng(std::uint64_t key) : key_(key) {}

    static constexpr CounterRng keyed(std::uint64_t seed, std::uint64_t trial, std::uint64_t device,
                                      std::uint64_t stream) {
        return CounterRng(combine(combine(combine(mix64(seed), trial), device), stream));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    constexpr result_type operator()() { return mix64(key_ + 0x9e3779b97f4a7c15ull * ++counter_); }

    /// Uniform double in the open interval (0, 1).
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal draw (Box-Muller, one output per call).
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    [[nodiscard]] constexpr std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace rram
