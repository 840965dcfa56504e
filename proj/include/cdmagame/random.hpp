// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#ifndef CDMAGAME_RANDOM_HPP
#define CDMAGAME_RANDOM_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace cdmagame {

// Counter-based random stream.
//
// The n-th output is a pure function of (key, n), so a stream can be split into
// child streams by hashing an identifier into a fresh key. Experiments derive one
// child per (trial, user) which makes results independent of the order in which
// trials are evaluated.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : key_(mix(seed ^ 0x243F6A8885A308D3ULL)) {}

    RandomStream substream(std::uint64_t id) const {
        RandomStream child(0);
        child.key_ = mix(key_ ^ mix(id + 0x9E3779B97F4A7C15ULL));
        return child;
    }

    std::uint64_t next_u64() {
        return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL);
    }

    // Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal pair by Box-Muller; both outputs are used.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double t = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    // Circularly symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance) {
        const double s = std::sqrt(variance / 2.0);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire's multiply-shift with rejection
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = -n % n;
            while (low < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace cdmagame

#endif
