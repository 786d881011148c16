#pragma once

#include <cmath>
#include <cstdint>

#include "wishmom/errors.hpp"

namespace wishmom {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

// Splittable deterministic random stream. A stream is keyed by (seed, stream
// id); distinct ids give statistically independent substreams, which is what
// makes chunked Monte Carlo reproducible independently of scheduling. The
// sequence is a SplitMix64 walk from a mixed starting state, so results are
// identical across platforms and build modes.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream)
        : state_(detail::mix64(detail::mix64(seed) ^
                               (0x9e3779b97f4a7c15ULL * (stream + 0x632be59bd9b4e019ULL)))) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on (0, 1]; never returns 0, so it is log-safe.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the second variate of each pair is cached.
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    // Gamma(shape, scale 1) by Marsaglia-Tsang squeeze; shape < 1 is boosted
    // through gamma(shape + 1) * U^(1/shape).
    double next_gamma(double shape) {
        if (!(shape > 0.0)) throw InvalidInputError("next_gamma: shape must be positive");
        if (shape < 1.0) {
            const double u = next_uniform();
            return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = next_normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            const double u = next_uniform();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double next_chi_square(double dof) {
        if (!(dof > 0.0)) throw InvalidInputError("next_chi_square: dof must be positive");
        return 2.0 * next_gamma(0.5 * dof);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace wishmom
