#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

namespace dynregret {

/// xorshift64* generator. The 64-bit seed is scrambled once through
/// splitmix64 so that small or zero seeds still give a nonzero state.
/// Normals come from the polar-free Box-Muller transform and the second
/// variate of each pair is cached.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : state_(splitmix64(seed)) {
        if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;
    }

    std::uint64_t next_u64() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545F4914F6CDD1DULL;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t uniform_index(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] keeps the log finite.
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Derive an independent stream, e.g. one per round or per seed index.
    SeededRng fork(std::uint64_t stream) { return SeededRng(next_u64() ^ splitmix64(stream + 0x632BE59BD9B4E019ULL)); }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// d independent standard normal draws.
inline Eigen::VectorXd gaussian_sample(SeededRng& rng, int d) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = rng.normal();
    return v;
}

/// Uniformly distributed unit vector.
inline Eigen::VectorXd random_direction(SeededRng& rng, int d) {
    for (;;) {
        Eigen::VectorXd v = gaussian_sample(rng, d);
        const double n = v.norm();
        if (n > 1e-12) return v / n;
    }
}

} // namespace dynregret
