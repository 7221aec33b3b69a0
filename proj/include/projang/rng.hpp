#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>

namespace projang {

// Deterministic random stream. The engine (mt19937_64) is bit-exact across
// platforms; the distributions below are hand-rolled from raw 64-bit draws so
// results do not depend on the standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Derives an independent stream from (master seed, index), splitmix64-style.
    static Rng derive(std::uint64_t master, std::uint64_t index) {
        std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return Rng(z);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as a log argument.
    double uniform_pos() { return 1.0 - uniform(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t uniform_index(std::uint64_t n) {
        // Rejection-free modulo is fine here; n is tiny compared to 2^64.
        return engine_() % n;
    }

    // Standard normal via Box-Muller.
    double gaussian() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    Eigen::VectorXd gaussian_vector(int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = gaussian();
        return v;
    }

    // Uniform point on the unit sphere in R^n.
    Eigen::VectorXd sphere_vector(int n) {
        Eigen::VectorXd v = gaussian_vector(n);
        double norm = v.norm();
        while (norm < 1e-12) {
            v = gaussian_vector(n);
            norm = v.norm();
        }
        return v / norm;
    }

    // Flat (symmetric Dirichlet) sample from the (n-1)-simplex.
    Eigen::VectorXd simplex_vector(int n) {
        Eigen::VectorXd w(n);
        for (int i = 0; i < n; ++i) w[i] = -std::log(uniform_pos());
        return w / w.sum();
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace projang
