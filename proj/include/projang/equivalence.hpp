#pragma once

#include "projang/measures.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace projang {

struct EquivalenceWitness {
    bool equivalent = false;
    std::optional<Matrix> rotation;                          // orthogonal, maps mu atoms onto nu atoms
    std::optional<std::vector<std::pair<int, int>>> atom_matching; // (mu index, nu index) after projection
    double residual = std::numeric_limits<double>::infinity(); // max projective displacement
};

// Decides whether mu and nu coincide as measures on RP^d up to an orthogonal
// transformation: projects both, searches weight/distance-consistent atom
// bijections, and aligns each candidate with a sign-resolved Procrustes fit.
// Guard: at most 64 atoms per measure after projection.
EquivalenceWitness essentially_equivalent(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                          double tol = 1e-6);

// True iff the projective support is an orthonormal basis carrying all mass:
// exactly d+1 atoms, positive weights, pairwise |x_i . x_j| <= tol.
bool is_in_PDelta(const DiscreteMeasure& mu, double tol = 1e-6);

}  // namespace projang
