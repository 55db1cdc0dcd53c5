#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace cogmac {

/// SplitMix64: the splittable stream generator used throughout the
/// simulators. Every slot of every run owns its own sub-stream derived from
/// (master seed, slot index), so results are bit-identical under any shard
/// schedule.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() { return double(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_double() < p; }

    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    /// Uniform integer in [0, k).
    std::uint64_t below(std::uint64_t k) { return next() % k; }

    /// Index drawn from the distribution with the given cumulative weights
    /// (cumulative.back() == 1).
    std::size_t pick(std::span<const double> cumulative) {
        const double u = next_double();
        std::size_t lo = 0, hi = cumulative.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (u < cumulative[mid])
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

    /// Poisson by the product method, splitting large means into exact
    /// independent chunks so exp() never underflows.
    std::uint64_t poisson(double mean) {
        std::uint64_t total = 0;
        while (mean > 20.0) {
            total += poisson_small(20.0);
            mean -= 20.0;
        }
        return total + poisson_small(mean);
    }

private:
    std::uint64_t poisson_small(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        double prod = 1.0;
        std::uint64_t k = 0;
        do {
            ++k;
            prod *= next_double();
        } while (prod > limit);
        return k - 1;
    }

    std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// The sub-stream owned by one slot of one run.
inline SplitMix64 slot_stream(std::uint64_t master_seed, std::uint64_t slot) {
    return SplitMix64(mix64(master_seed + 0x9e3779b97f4a7c15ull * (slot + 1)));
}

} // namespace cogmac
