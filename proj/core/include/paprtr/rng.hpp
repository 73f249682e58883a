#ifndef PAPRTR_RNG_HPP
#define PAPRTR_RNG_HPP

/**
 * @file rng.hpp
 * @brief Deterministic per-stream random number generation.
 *
 * Monte Carlo trials must be reproducible independently of execution order
 * and thread count, so every consumer gets its own stream derived from a
 * (seed, stream id) pair instead of sharing one generator. The engine is
 * std::mt19937_64 (bit-exact by the C++ standard); the distributions are
 * implemented here because the standard library ones are
 * implementation-defined.
 */

#include <cstdint>
#include <random>

namespace paprtr {

/// SplitMix64 step; used to derive well-mixed seeds from (seed, stream) pairs.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/**
 * @brief Independent random stream for one Monte Carlo trial (or any other
 *        consumer that needs reproducible draws).
 */
class TrialRng {
public:
    TrialRng(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t state = seed;
        std::uint64_t a = splitmix64(state);
        state ^= 0x6a09e667f3bcc909ULL + stream;
        std::uint64_t b = splitmix64(state);
        engine_.seed(a ^ (b * 0x9e3779b97f4a7c15ULL + stream));
    }

    std::uint64_t bits() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(bits() >> 11) * 0x1.0p-53;
    }

    /// Unbiased uniform integer in [0, n), n >= 1, via rejection sampling.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v = bits();
        while (v >= limit) {
            v = bits();
        }
        return v % n;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace paprtr

#endif  // PAPRTR_RNG_HPP
