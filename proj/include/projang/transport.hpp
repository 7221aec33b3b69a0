#pragma once

#include "projang/measures.hpp"

#include <utility>

namespace projang {

enum class TransportMetric { Sphere, Projective };

// Coupling between two discrete measures; row sums reproduce the source
// weights and column sums the target weights (within 1e-10).
struct TransportPlan {
    int rows = 0;
    int cols = 0;
    Matrix mass;                 // rows x cols, nonnegative
    double cost_exponent = 1.0;  // 1, 2, or +inf
    TransportMetric metric = TransportMetric::Sphere;
};

// L^p Kantorovich-Rubinstein-Wasserstein distance, p in {1, 2}. Uniform
// same-size inputs reduce to an optimal assignment (the optimal coupling is a
// permutation); general weights go through exact min-cost flow on masses
// rounded to a 1e-12 grid.
std::pair<double, TransportPlan> dp_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                             int p, TransportMetric metric = TransportMetric::Sphere);

// Bottleneck distance d_inf: the smallest pairwise distance threshold at which
// a feasible coupling exists on the edges below it. The returned value is
// bitwise an element of the pairwise distance multiset.
std::pair<double, TransportPlan> dinf_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                               TransportMetric metric = TransportMetric::Sphere);

// Exhaustive minimum over all N! assignments; oracle for the Birkhoff
// reduction. Requires both measures uniform with equal N <= 8. p < 0 selects
// the bottleneck objective (max instead of mean).
double assignment_bruteforce(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int p,
                             TransportMetric metric = TransportMetric::Sphere);

// Pairwise distance matrix under the chosen metric.
Matrix distance_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, TransportMetric metric);

namespace detail {

// Exact O(n^3) solver for the square linear assignment problem; returns the
// column matched to each row.
std::vector<int> solve_assignment(const Matrix& cost);

}  // namespace detail

}  // namespace projang
