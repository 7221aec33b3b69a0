#pragma once

#include "projang/geometry.hpp"

#include <cstdint>
#include <string>

namespace projang {

enum class MeasureClass { PNEq, POn, POnEq, PDelta, PDeltaEq, PNDeltaEq, Other };

// Discrete probability measure on S^d: unit points (matrix columns) with
// nonnegative weights summing to 1. Immutable after construction.
class DiscreteMeasure {
public:
    // Columns of `points` must be unit vectors within kUnitNormTol; weights are
    // renormalized to sum exactly to 1 and atoms below 1e-15 mass are dropped.
    DiscreteMeasure(Matrix points, Vector weights);

    static DiscreteMeasure uniform(Matrix points);
    static DiscreteMeasure dirac(const SpherePoint& x);

    // Internal: wraps data that already satisfies the invariants bit-for-bit
    // (unit columns, normalized nonnegative weights) without renormalizing.
    static DiscreteMeasure trusted(Matrix points, Vector weights);

    int dim() const { return static_cast<int>(points_.rows()) - 1; }
    int size() const { return static_cast<int>(points_.cols()); }

    const Matrix& points() const { return points_; }
    const Vector& weights() const { return weights_; }

    SpherePoint atom(int i) const;
    double weight(int i) const { return weights_[i]; }

    DiscreteMeasure rotated(const Matrix& orthogonal) const;

private:
    struct trusted_tag {};
    DiscreteMeasure(Matrix points, Vector weights, trusted_tag)
        : points_(std::move(points)), weights_(std::move(weights)) {}

    Matrix points_;  // (d+1) x n, unit columns
    Vector weights_; // n, nonnegative, sums to 1
};

// mu_hat: mass 1/(d+1) on each standard basis vector of R^{d+1}.
DiscreteMeasure equidistributed_basis(int d);

// psi_N: N points of mass 1/N spread as evenly as possible over the standard
// basis (class sizes q or q+1 with N = q(d+1) + r); coincident atoms merged.
DiscreteMeasure fejes_toth_config(int d, int N);

// N points sampled uniformly on S^d; weights uniform, or flat-simplex when
// `weighted`. Deterministic in `seed`.
DiscreteMeasure random_configuration(int d, int N, std::uint64_t seed, bool weighted = false);

// Canonical projective representative: each atom sign-flipped so its largest-
// magnitude coordinate is positive, then atoms within merge_tol of each other
// (projective metric) merged. Leaves every Lambda-power energy unchanged.
DiscreteMeasure project_to_rp(const DiscreteMeasure& mu, double merge_tol = 1e-9);

MeasureClass classify(const DiscreteMeasure& mu, double tol = 1e-9);

std::string to_string(MeasureClass c);

// JSON file format: {"dim": d, "points": [[d+1 reals]...], "weights": [...]}.
// The loader renormalizes weights when |sum - 1| <= 1e-6 and points within
// 1e-6 of unit norm; anything farther off is an error.
DiscreteMeasure load_measure(const std::string& path);
void save_measure(const DiscreteMeasure& mu, const std::string& path);
DiscreteMeasure measure_from_json(const std::string& text);
std::string measure_to_json(const DiscreteMeasure& mu);

}  // namespace projang
