#include "projang/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace projang {

SpherePoint::SpherePoint(Vector coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2) throw std::invalid_argument("SpherePoint: need d >= 1 (at least 2 coordinates)");
    const double norm = coords_.norm();
    if (std::abs(norm - 1.0) > kUnitNormTol)
        throw std::invalid_argument("SpherePoint: coordinates not unit norm");
    coords_ /= norm;
}

SpherePoint SpherePoint::from_unnormalized(Vector coords) {
    if (coords.size() < 2) throw std::invalid_argument("SpherePoint: need d >= 1 (at least 2 coordinates)");
    const double norm = coords.norm();
    if (norm < 1e-12) throw std::invalid_argument("SpherePoint: cannot normalize near-zero vector");
    return SpherePoint(coords / norm, unchecked_tag{});
}

SpherePoint SpherePoint::basis(int dim, int i) {
    if (dim < 1 || i < 0 || i > dim) throw std::invalid_argument("SpherePoint::basis: index out of range");
    Vector v = Vector::Zero(dim + 1);
    v[i] = 1.0;
    return SpherePoint(v, unchecked_tag{});
}

SpherePoint SpherePoint::antipode() const { return SpherePoint(-coords_, unchecked_tag{}); }

TangentVector::TangentVector(SpherePoint base, Vector vec) : base_(std::move(base)), vec_(std::move(vec)) {
    if (vec_.size() != base_.coords().size())
        throw std::invalid_argument("TangentVector: dimension mismatch");
    const double along = vec_.dot(base_.coords());
    if (std::abs(along) > 1e-9 * std::max(1.0, vec_.norm()))
        throw std::invalid_argument("TangentVector: not orthogonal to base point");
    vec_ -= along * base_.coords();
}

TangentVector TangentVector::zero(const SpherePoint& base) {
    return TangentVector(base, Vector::Zero(base.ambient_dim()));
}

KernelSpec KernelSpec::lambda_power(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("KernelSpec: alpha must be positive");
    KernelSpec s;
    s.family = KernelFamily::LambdaPower;
    s.alpha = alpha;
    return s;
}

KernelSpec KernelSpec::lambda_infinity(double orth_tol) {
    if (!(orth_tol > 0.0) || orth_tol > 1e-3)
        throw std::invalid_argument("KernelSpec: orth_tol must lie in (0, 1e-3]");
    KernelSpec s;
    s.family = KernelFamily::LambdaPower;
    s.alpha = std::numeric_limits<double>::infinity();
    s.orth_tol = orth_tol;
    return s;
}

KernelSpec KernelSpec::quadratic_g() {
    KernelSpec s;
    s.family = KernelFamily::QuadraticG;
    s.alpha = 2.0;
    return s;
}

namespace {

void check_same_dim(const SpherePoint& x, const SpherePoint& y) {
    if (x.dim() != y.dim()) throw std::invalid_argument("sphere points have different dimensions");
}

}  // namespace

double geodesic_distance(const SpherePoint& x, const SpherePoint& y) {
    check_same_dim(x, y);
    return std::acos(detail::clamp_unit(x.coords().dot(y.coords())));
}

double projective_kernel(const SpherePoint& x, const SpherePoint& y) {
    check_same_dim(x, y);
    return detail::lambda_from_dot(x.coords().dot(y.coords()));
}

double projective_rho(const SpherePoint& x, const SpherePoint& y) {
    check_same_dim(x, y);
    return std::acos(detail::clamp_unit(std::abs(x.coords().dot(y.coords()))));
}

double kernel_value(const KernelSpec& spec, const SpherePoint& x, const SpherePoint& y) {
    check_same_dim(x, y);
    return detail::kernel_from_dot(spec, x.coords().dot(y.coords()));
}

SpherePoint exp_map(const TangentVector& v) {
    const double len = v.norm();
    if (len >= M_PI) throw std::domain_error("exp_map: |v| >= pi is outside the injectivity radius");
    if (len == 0.0) return v.base();
    const Vector dir = v.vec() / len;
    return SpherePoint::from_unnormalized(v.base().coords() * std::cos(len) + dir * std::sin(len));
}

TangentVector log_map(const SpherePoint& x, const SpherePoint& base) {
    check_same_dim(x, base);
    const double theta = geodesic_distance(x, base);
    if (theta >= M_PI - 1e-9) throw std::domain_error("log_map: near-antipodal input");
    if (theta < 1e-12) return TangentVector::zero(base);
    Vector perp = x.coords() - x.coords().dot(base.coords()) * base.coords();
    const double pnorm = perp.norm();
    if (pnorm < 1e-15) return TangentVector::zero(base);
    return TangentVector(base, (theta / pnorm) * perp);
}

KernelGradient grad_kernel(const KernelSpec& spec, const SpherePoint& x, const SpherePoint& y) {
    check_same_dim(x, y);
    const double dot = x.coords().dot(y.coords());

    if (spec.family == KernelFamily::QuadraticG) {
        // Tangent projection of the ambient gradient -2t y.
        Vector g = -2.0 * dot * (y.coords() - dot * x.coords());
        return {TangentVector(x, std::move(g)), false};
    }
    if (spec.is_infinite())
        throw std::invalid_argument("grad_kernel: alpha must be finite");

    const double alpha = spec.alpha;
    const double rho = std::acos(detail::clamp_unit(dot));

    // Derivative vanishes at the kink rho = pi/2 (maximum of Lambda_0).
    if (std::abs(rho - M_PI / 2.0) <= 1e-9) return {TangentVector::zero(x), false};

    const bool near_pole = rho < 1e-7 || rho > M_PI - 1e-7;
    if (near_pole && alpha > 1.0) return {TangentVector::zero(x), false};

    Vector perp = y.coords() - dot * x.coords();
    const double pnorm = perp.norm(); // equals sin(rho) up to roundoff
    if (pnorm < 1e-15) {
        // Coincident or antipodal: ascent direction undefined.
        return {TangentVector::zero(x), alpha <= 1.0};
    }

    const double lambda0 = detail::lambda_from_dot(dot);
    const double dlambda0 = (rho < M_PI / 2.0) ? 2.0 / M_PI : -2.0 / M_PI;
    double magnitude = alpha * std::pow(lambda0, alpha - 1.0) * dlambda0;

    bool capped = false;
    if (std::abs(magnitude) > 1e6) {
        magnitude = magnitude > 0 ? 1e6 : -1e6;
        capped = true;
    }

    // grad rho = -(y - (x.y)x)/sin(rho); chain rule with Lambda_0^alpha.
    Vector g = (-magnitude / pnorm) * perp;
    return {TangentVector(x, std::move(g)), capped};
}

}  // namespace projang
