#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace aecqtl {

/// Seeded generator with fully specified derived distributions.
///
/// The standard library's distribution objects are implementation-defined,
/// so every draw here is built directly on the raw 64-bit output of
/// mt19937_64 (whose sequence is fixed by the standard):
///  - uniform(): top 53 bits scaled into [0, 1)
///  - normal():  Marsaglia polar method, caching the second variate
///  - below(n):  rejection sampling on the top bits, no modulo bias
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) {
            return 0;
        }
        int bits = 64 - __builtin_clzll(n - 1);
        for (;;) {
            const std::uint64_t r = engine_() >> (64 - bits);
            if (r < n) {
                return r;
            }
        }
    }

    /// Fisher-Yates, last index downward.
    template <class T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace aecqtl
