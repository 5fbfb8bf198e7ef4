#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace pacdisp::detail {

// std::mt19937_64 output is fixed by the standard, but the distributions and
// std::shuffle are not; these helpers keep seeded runs identical across
// standard libraries.
using Engine = std::mt19937_64;

// Uniform integer in [0, n) by rejection sampling.
inline std::uint64_t uniform_index(Engine& eng, std::uint64_t n)
{
    const std::uint64_t limit = Engine::max() - Engine::max() % n;
    std::uint64_t v;
    do {
        v = eng();
    } while (v >= limit);
    return v % n;
}

// Uniform real in [0, 1) with 53 random bits.
inline double uniform_real(Engine& eng)
{
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double standard_normal(Engine& eng)
{
    // Box-Muller, one deviate per call.
    double u1;
    do {
        u1 = uniform_real(eng);
    } while (u1 <= 0.0);
    const double u2 = uniform_real(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

template <typename T>
void shuffle(std::vector<T>& v, Engine& eng)
{
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(eng, i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace pacdisp::detail
