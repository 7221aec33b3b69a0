#pragma once

#include "projang/energy.hpp"

#include <vector>

namespace projang {

struct MomentMatrix {
    Matrix entries; // (d+1) x (d+1), symmetric PSD, unit trace
};

struct MajorizationReport {
    double alpha = 0.0;
    double min_gap = 0.0;      // min of h = g - f_alpha over the evaluation set
    double argmin_t = 0.0;     // where the minimum is attained
    double outermost_violation_t = 0.0; // violating point of largest |t|, 0 if none
    std::vector<double> equality_points; // |h| <= 1e-9
    bool pass = false;
};

struct FrameBoundReport {
    double tr_I2 = 0.0;
    double lower_bound = 0.0;  // 1/(d+1)
    bool tight = false;        // |tr_I2 - 1/(d+1)| <= 1e-9
    double energy_identity_gap = 0.0; // |E_g(mu) - (1 - tr_I2)|, Plain convention
};

struct ChainReport {
    double e_f = 0.0;       // E_{f_alpha}(mu), Plain
    double e_g = 0.0;       // E_g(mu), Plain
    double e_g_sigma = 0.0; // E_g(sigma) = d/(d+1), analytic
    bool pass = false;
};

// Checks the pointwise majorization g(t) = 1 - t^2 >= f_alpha(t) on [-1, 1]
// over a uniform grid augmented with the exact points {-1, 0, 1} and a
// geometric refinement toward the endpoints, where violations for alpha < 2
// concentrate. Equality may occur only within 1e-6 of {-1, 0, 1}.
MajorizationReport majorization_check(double alpha, int grid_size);

// Second-moment matrix I(mu) = sum_k w_k x_k x_k^T.
MomentMatrix moment_matrix(const DiscreteMeasure& mu);

// Hilbert-Schmidt bound Tr(I^2) >= 1/(d+1) plus the algebraic identity
// E_g(mu) = 1 - Tr(I(mu)^2) (Plain convention).
FrameBoundReport frame_bound_check(const DiscreteMeasure& mu);

// The majorization chain E_{f_alpha}(mu) <= E_g(mu) <= E_g(sigma) = d/(d+1)
// for alpha >= 2; throws below 2 where the chain is not asserted.
ChainReport chain_check(const DiscreteMeasure& mu, double alpha);

}  // namespace projang
