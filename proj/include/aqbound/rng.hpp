#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "aqbound/errors.hpp"

namespace aqb {

// Seeded generator with portable draw helpers.  std::uniform_int_distribution is
// implementation-defined, which would break byte-identical outputs across
// standard libraries, so the bounded draws are spelled out here.
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform integer in [lo, hi], inclusive.
    int64_t uniform_int(int64_t lo, int64_t hi) {
        if (lo > hi) fail(ErrorCode::InvalidArgument, "uniform_int: empty range");
        uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<int64_t>(next_u64());  // full 64-bit range
        // Rejection sampling to avoid modulo bias.
        uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return lo + static_cast<int64_t>(x % span);
    }

    // Uniform real in [0, 1).
    double uniform_real() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform real in [lo, hi).
    double uniform_real(double lo, double hi) {
        return lo + (hi - lo) * uniform_real();
    }

    bool bernoulli(double p) { return uniform_real() < p; }

    // Index drawn proportionally to the given nonnegative weights.
    size_t weighted_index(const std::vector<double>& weights) {
        double total = 0;
        for (double w : weights) {
            if (w < 0) fail(ErrorCode::InvalidArgument, "weighted_index: negative weight");
            total += w;
        }
        if (total <= 0) fail(ErrorCode::InvalidArgument, "weighted_index: all weights zero");
        double x = uniform_real() * total;
        double acc = 0;
        for (size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (x < acc) return i;
        }
        return weights.size() - 1;
    }

    // In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (size_t i = items.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_int(0, static_cast<int64_t>(i) - 1));
            std::swap(items[i - 1], items[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace aqb
