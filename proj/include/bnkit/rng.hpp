#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace bnkit {

/// Seeded pseudo-random source used by sampling, bootstrap and restarts.
///
/// The engine is std::mt19937_64 (MT19937-64 as fixed by the C++ standard),
/// so raw draws are reproducible across platforms. Uniform reals take the top
/// 53 bits of one draw; integers below n use rejection sampling. Standard
/// library distributions are avoided because their algorithms are
/// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n); n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Index drawn from an unnormalized non-negative weight vector by
    /// inverse CDF. Falls back to the last positive entry on round-off.
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        const double u = uniform() * total;
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            acc += weights[i];
            last_positive = i;
            if (u < acc) return i;
        }
        return last_positive;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace bnkit
