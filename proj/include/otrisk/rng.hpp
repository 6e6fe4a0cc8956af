#pragma once

#include <cstdint>
#include <random>

#include "otrisk/numerics.hpp"

namespace otrisk {

/// Seeded engine for a named sub-stream.  Every stochastic routine takes a
/// master seed and derives one engine per logical stream (path index,
/// replication index, ...) so results are reproducible and independent of
/// evaluation order.
inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t stream) {
    return std::mt19937_64(derive_seed(master, stream));
}

/// Uniform draw on the open interval (0, 1); never returns 0 or 1 so logs and
/// inverse-CDF transforms stay finite.
inline double uniform_open(std::mt19937_64& eng) {
    // 53-bit mantissa draw shifted into (0,1)
    const std::uint64_t bits = eng() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

inline double normal_draw(std::mt19937_64& eng) {
    // Explicit Box-Muller keeps draws identical across standard libraries,
    // which the byte-identical report requirement relies on.
    const double u1 = uniform_open(eng);
    const double u2 = uniform_open(eng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(6.283185307179586477 * u2);
}

/// Pareto draw with P(X > x) = min(1, x^-alpha), support [1, inf).
inline double pareto_draw(std::mt19937_64& eng, double alpha) {
    return std::pow(uniform_open(eng), -1.0 / alpha);
}

} // namespace otrisk
