#pragma once

// Deterministic counter-keyed random streams. Streams are derived by
// hashing (seed, hi, lo) index tuples, so any draw can be addressed
// directly and results never depend on evaluation order or worker count.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "metacorr/special.hpp"

namespace metacorr {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

namespace detail {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

}  // namespace detail

// Collapses a (seed, hi, lo) address into a stream key.
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t hi, std::uint64_t lo) {
    std::uint64_t h = detail::mix64(seed + kGoldenGamma);
    h = detail::mix64(h ^ (hi + kGoldenGamma));
    h = detail::mix64(h ^ (lo + kGoldenGamma));
    return h;
}

class RngStream {
  public:
    explicit RngStream(std::uint64_t key) : state_(key) {}
    RngStream(std::uint64_t seed, std::uint64_t hi, std::uint64_t lo)
        : state_(stream_key(seed, hi, lo)) {}

    std::uint64_t next_u64() {
        state_ += kGoldenGamma;
        return detail::mix64(state_);
    }

    // uniform on (0, 1]
    double uniform() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // standard normal, Box-Muller with a cached spare
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * kPi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    // Gamma(shape, 1), Marsaglia-Tsang squeeze; shape < 1 boosted.
    double gamma(double shape) {
        if (!(shape > 0.0)) {
            throw std::invalid_argument("RngStream::gamma: requires shape > 0");
        }
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / (3.0 * std::sqrt(d));
        for (;;) {
            double x;
            double v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double beta(double a, double b) {
        const double x = gamma(a);
        return x / (x + gamma(b));
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// One standard-normal draw addressed by (seed, replicate, index).
inline double normal_at(std::uint64_t seed, std::uint64_t replicate, std::uint64_t index) {
    RngStream stream(seed, replicate, index);
    return stream.normal();
}

}  // namespace metacorr
