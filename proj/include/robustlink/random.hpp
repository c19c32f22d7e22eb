// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace robustlink {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based seed derivation: the same (master, path...) always yields the
/// same seed, independent of the order in which streams are created.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path)
{
    std::uint64_t s = mix64(master);
    for (auto p : path) {
        s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
    }
    return s;
}

/// Draw from CN(0, 1).
inline std::complex<double> complex_normal(Rng& rng)
{
    std::normal_distribution<double> n(0.0, 0.70710678118654752440);
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

}  // namespace robustlink
