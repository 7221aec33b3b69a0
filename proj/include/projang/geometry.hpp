#pragma once

#include <Eigen/Dense>

#include <limits>

namespace projang {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

constexpr double kUnitNormTol = 1e-9;

// Unit vector in R^{d+1}, the point type for S^d (d >= 1).
class SpherePoint {
public:
    // Requires |coords| to be within kUnitNormTol of 1; renormalizes exactly.
    explicit SpherePoint(Vector coords);

    // Normalizes an arbitrary nonzero vector onto the sphere.
    static SpherePoint from_unnormalized(Vector coords);

    // i-th standard basis vector of R^{d+1}, 0 <= i <= d.
    static SpherePoint basis(int dim, int i);

    const Vector& coords() const { return coords_; }
    int dim() const { return static_cast<int>(coords_.size()) - 1; }
    int ambient_dim() const { return static_cast<int>(coords_.size()); }

    SpherePoint antipode() const;

private:
    struct unchecked_tag {};
    SpherePoint(Vector coords, unchecked_tag) : coords_(std::move(coords)) {}
    Vector coords_;
};

// Vector in the tangent space at `base`: vec . base = 0.
class TangentVector {
public:
    // Re-projects vec onto base^perp; throws if the component along base
    // exceeds the tolerance (the caller did not hand us a tangent vector).
    TangentVector(SpherePoint base, Vector vec);

    static TangentVector zero(const SpherePoint& base);

    const SpherePoint& base() const { return base_; }
    const Vector& vec() const { return vec_; }
    double norm() const { return vec_.norm(); }

private:
    SpherePoint base_;
    Vector vec_;
};

enum class KernelFamily { LambdaPower, QuadraticG };

// Interaction kernel: Lambda(x,y)^alpha (alpha in (0, inf]) or g(t) = 1 - t^2.
struct KernelSpec {
    KernelFamily family = KernelFamily::LambdaPower;
    double alpha = 1.0;     // exponent; +inf selects the orthogonality indicator
    double orth_tol = 1e-9; // angular half-width of the alpha = inf indicator

    static KernelSpec lambda_power(double alpha);
    static KernelSpec lambda_infinity(double orth_tol = 1e-9);
    static KernelSpec quadratic_g();

    bool is_infinite() const { return std::isinf(alpha) && family == KernelFamily::LambdaPower; }
};

// Geodesic distance rho(x,y) = arccos(x.y) in [0, pi].
double geodesic_distance(const SpherePoint& x, const SpherePoint& y);

// Projective distance rescaled to unit diameter:
// Lambda(x,y) = (2/pi) min(rho, pi - rho) = (2/pi) arccos|x.y|, in [0, 1].
double projective_kernel(const SpherePoint& x, const SpherePoint& y);

// Quotient metric on RP^d: min(rho(x,y), rho(x,-y)) = arccos|x.y| in [0, pi/2].
double projective_rho(const SpherePoint& x, const SpherePoint& y);

// Kernel evaluation under `spec`.
double kernel_value(const KernelSpec& spec, const SpherePoint& x, const SpherePoint& y);

// Riemannian exponential map; requires |v| < pi (injectivity radius policy).
SpherePoint exp_map(const TangentVector& v);

// Inverse of exp_map at `base`; requires rho(x, base) < pi - 1e-9.
TangentVector log_map(const SpherePoint& x, const SpherePoint& base);

struct KernelGradient {
    TangentVector tangent;
    bool capped = false; // magnitude clamped at the coincidence singularity (alpha <= 1)
};

// Riemannian gradient of kernel_value(spec, . , y) at x. The Lambda kernel has
// a kink at rho = pi/2; within 1e-9 of it the derivative is taken to be 0, so
// orthogonal configurations are exactly stationary.
KernelGradient grad_kernel(const KernelSpec& spec, const SpherePoint& x, const SpherePoint& y);

namespace detail {

inline double clamp_unit(double t) { return t < -1.0 ? -1.0 : (t > 1.0 ? 1.0 : t); }

// Lambda from the raw inner product; exact under sign flips of either
// argument. Returns exactly 1 on the orthogonality band |dot| <= 1e-9, the
// same band where the kernel derivative is taken to vanish.
inline double lambda_from_dot(double dot) {
    const double a = std::abs(dot);
    if (a <= 1e-9) return 1.0;
    return (2.0 / M_PI) * std::acos(clamp_unit(a));
}

inline double kernel_from_dot(const KernelSpec& spec, double dot) {
    if (spec.family == KernelFamily::QuadraticG) return 1.0 - dot * dot;
    if (spec.is_infinite()) return std::abs(dot) <= std::sin(spec.orth_tol) ? 1.0 : 0.0;
    return std::pow(lambda_from_dot(dot), spec.alpha);
}

}  // namespace detail

}  // namespace projang
