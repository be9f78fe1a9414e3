#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "rrlab/mat.hpp"

namespace rrlab {

// splitmix64 step; also used to derive independent per-trial seeds from a
// master seed: trial_seed = split_seed(master, trial_id). Documented scheme,
// stable across platforms and schedulers.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

// Deterministic generator: mt19937_64 (bit-exact per the standard) with
// hand-rolled uniform/gaussian transforms, since the std distributions are
// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; one value per call, cache holds the pair's second half.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    Vec gaussian_vec(std::size_t n) {
        Vec v(n);
        for (auto& x : v) x = gaussian();
        return v;
    }

    // Uniform point on the radius-r sphere via a normalized gaussian.
    Vec sphere(std::size_t n, double r) {
        if (r == 0.0) return Vec(n, 0.0);
        Vec v;
        double nv = 0.0;
        do {
            v = gaussian_vec(n);
            nv = norm(v);
        } while (nv == 0.0);
        for (auto& x : v) x *= r / nv;
        return v;
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rrlab
