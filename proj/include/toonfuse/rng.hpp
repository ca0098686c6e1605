#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace toonfuse {

// Seeded stream used for every random draw in the project.
//
// The raw engine is std::mt19937_64, whose output sequence is fixed by the
// C++ standard. Uniform and normal variates are derived here rather than via
// std::*_distribution, which are implementation-defined:
//   uniform = (raw >> 11) * 2^-53                  in [0, 1)
//   normal  = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)   one variate per two raws
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

// Derives an independent seed for a named sub-stream (splitmix64 finaliser).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace toonfuse
