#pragma once

#include "projang/energy.hpp"
#include "projang/equivalence.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace projang {

struct AscentOptions {
    int restarts = 8;
    int max_iters = 2000;
    double initial_step = 0.5;  // radians
    double grad_tol = 1e-10;
    double energy_tol = 1e-13;  // stagnation threshold on accepted gains
    std::uint64_t seed = 0;
    int threads = 1;            // execution width only; results are thread-count independent

    void validate() const {
        if (restarts < 1 || max_iters < 1 || !(initial_step > 0.0) || !(grad_tol > 0.0) ||
            !(energy_tol > 0.0) || threads < 1)
            throw std::invalid_argument("AscentOptions: invalid options");
    }
};

struct AscentResult {
    DiscreteMeasure best;
    double best_energy = 0.0; // Half convention
    std::vector<double> per_restart_energies;
    std::vector<int> iterations;
    std::vector<bool> converged_flags;
};

enum class ThresholdVerdict { Below, Above, Tie };

struct ThresholdSample {
    double alpha = 0.0;
    double best_energy = 0.0;
    double conjectured = 0.0;
    ThresholdVerdict verdict = ThresholdVerdict::Tie;
};

struct ThresholdEstimate {
    int d = 0;
    int N = 0;
    double alpha_lo = 0.0;
    double alpha_hi = 0.0;
    std::vector<ThresholdSample> samples;
    double tolerance = 0.0;
    bool trivial = false; // N <= d+1: threshold at or below alpha_lo
    bool widened = false; // upper endpoint was not "above" and had to move once
};

class ThresholdInconsistency : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct StabilityReport {
    int trials = 0;
    int violations = 0;          // trials with E(xi) > E(xi_hat) + 1e-12
    double max_energy_gain = 0.0;
    double radius = 0.0;
    double alpha = 0.0;
};

struct AggregationReport {
    SpherePoint xbar;
    double c_empirical = 0.0;
    double radius = 0.0;
    int sample_count = 0;
    double c_target = 0.0;
    bool pass = false;
};

// Multi-restart Riemannian gradient ascent of E_alpha over N uniform-weight
// particles on S^d. Accepted line-search steps never decrease the energy;
// restarts are independent streams derived from (seed, restart index), so the
// result is identical for any thread count.
AscentResult maximize_particles(int d, int N, double alpha, const AscentOptions& opts);

// Maximizes the energy over the weight simplex at fixed support via projected
// gradient ascent; pairwise-orthogonal support short-circuits to exact uniform
// weights.
DiscreteMeasure maximize_weights(const std::vector<SpherePoint>& support, double alpha, int iters = 2000);

// Bisection estimate of the threshold exponent alpha_Delta(N): below which the
// ascent beats the Fejes Toth configuration, above which the best found
// configuration matches it. Heuristic upper-confidence bracket, not a proof.
ThresholdEstimate estimate_threshold(int d, int N, double alpha_lo, double alpha_hi,
                                     double alpha_tol, const AscentOptions& opts);

// Samples d_inf-perturbations of xi_hat (atom splitting + cap-bounded
// displacements) and counts energy gains above 1e-12.
StabilityReport stability_experiment(const DiscreteMeasure& xi_hat, double alpha, double r,
                                     int k_split, int trials, std::uint64_t seed);

// Empirical aggregation constant for the recentered-potential lower bound:
// minimizes F(x) = sum_i integral (1 - Lambda(x,y)) dnu_i over the cap at e_0,
// then reports min F(x)/rho(x, xbar) over sampled cap points.
AggregationReport aggregation_constant(const std::vector<DiscreteMeasure>& nu_list, double r,
                                       double c_target, int sample_count, std::uint64_t seed);

namespace detail {

// Euclidean projection onto the probability simplex.
Vector project_to_simplex(Vector v);

}  // namespace detail

}  // namespace projang
