#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace meco {

// std::mt19937_64 output is fully specified by the standard; the samplers here
// avoid std::*_distribution, whose algorithms are implementation-defined, so
// seeded runs reproduce bit-identically on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Unbiased integer in [0, n) via rejection.
    std::uint64_t uniform_below(std::uint64_t n) {
        if (n <= 1) return 0;
        std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    // Uniform in [0, 1) with 53 bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        return mean + stddev * z;
    }

    std::uint64_t poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        if (lambda > 30.0) {
            // Split so the multiplication method below stays in range.
            return poisson(lambda / 2.0) + poisson(lambda / 2.0);
        }
        double threshold = std::exp(-lambda);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > threshold);
        return k - 1;
    }

    std::uint64_t binomial(std::uint64_t n, double p) {
        if (n == 0 || p <= 0.0) return 0;
        if (p >= 1.0) return n;
        double np = static_cast<double>(n) * p;
        if (np * (1.0 - p) > 100.0) {
            double v = std::round(normal(np, std::sqrt(np * (1.0 - p))));
            if (v < 0.0) v = 0.0;
            if (v > static_cast<double>(n)) v = static_cast<double>(n);
            return static_cast<std::uint64_t>(v);
        }
        std::uint64_t k = 0;
        for (std::uint64_t i = 0; i < n; ++i)
            if (uniform() < p) ++k;
        return k;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[uniform_below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace meco
