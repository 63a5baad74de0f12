#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace commutesim {

/// Seeded generator with platform-stable draw helpers. std::mt19937_64 output
/// is pinned by the standard; the distribution logic here is hand-rolled so
/// results do not depend on the standard library's distribution internals.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [lo, hi], inclusive. Rejection sampling, unbiased.
    int64_t uniform_int(int64_t lo, int64_t hi) {
        if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
        const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<int64_t>(engine_());  // full 64-bit range
        const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return lo + static_cast<int64_t>(v % span);
    }

    /// Index drawn proportionally to nonnegative weights (at least one > 0).
    size_t pick_weighted(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) throw std::invalid_argument("pick_weighted: weights sum to zero");
        double u = uniform() * total;
        for (size_t i = 0; i < weights.size(); ++i) {
            u -= weights[i];
            if (u < 0.0) return i;
        }
        return weights.size() - 1;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace commutesim
