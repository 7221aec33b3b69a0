#include "projang/energy.hpp"

#include "projang/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace projang {

namespace {

// Inner product with exact coincidence detection: bitwise equal (or negated)
// points report dot = +-1 exactly, so the kernel vanishes on them identically
// instead of leaking O(ulp) through acos near 1.
double refined_dot(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
    const double dot = a.dot(b);
    if (dot > 1.0 - 1e-12 && (a - b).squaredNorm() == 0.0) return 1.0;
    if (dot < -1.0 + 1e-12 && (a + b).squaredNorm() == 0.0) return -1.0;
    return dot;
}

}  // namespace

double bilinear_form(const KernelSpec& spec, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (mu.dim() != nu.dim()) throw std::invalid_argument("bilinear_form: dimension mismatch");
    const Matrix& p = mu.points();
    const Matrix& q = nu.points();
    detail::KahanSum acc;
    for (int i = 0; i < p.cols(); ++i)
        for (int j = 0; j < q.cols(); ++j) {
            const double dot = refined_dot(p.col(i), q.col(j));
            acc.add(mu.weight(i) * nu.weight(j) * detail::kernel_from_dot(spec, dot));
        }
    return acc.value();
}

double energy_value(const KernelSpec& spec, const DiscreteMeasure& mu, Convention convention) {
    const double b = bilinear_form(spec, mu, mu);
    return convention == Convention::Half ? 0.5 * b : b;
}

EnergyReport energy(const KernelSpec& spec, const DiscreteMeasure& mu, Convention convention) {
    return {energy_value(spec, mu, convention), convention, spec};
}

double conjectured_value_infinite(int d, Convention convention) {
    if (d < 1) throw std::invalid_argument("conjectured_value: d >= 1 required");
    const double half = static_cast<double>(d) / (2.0 * d + 2.0);
    return convention == Convention::Half ? half : 2.0 * half;
}

double conjectured_value(int d, int N, Convention convention) {
    if (d < 1) throw std::invalid_argument("conjectured_value: d >= 1 required");
    if (N < d + 1) throw std::invalid_argument("conjectured_value: N < d+1 leaves basis slots empty");
    const double q = static_cast<double>(N / (d + 1));
    const double r = static_cast<double>(N % (d + 1));
    const double nn = static_cast<double>(N) * N;
    const double half = (nn - r * (q + 1) * (q + 1) - (d + 1 - r) * q * q) / (2.0 * nn);
    return convention == Convention::Half ? half : 2.0 * half;
}

double potential(const KernelSpec& spec, const DiscreteMeasure& mu, const SpherePoint& x) {
    if (mu.dim() != x.dim()) throw std::invalid_argument("potential: dimension mismatch");
    detail::KahanSum acc;
    for (int j = 0; j < mu.size(); ++j)
        acc.add(mu.weight(j) * detail::kernel_from_dot(spec, refined_dot(x.coords(), mu.points().col(j))));
    return acc.value();
}

double euler_lagrange_residual(const KernelSpec& spec, const DiscreteMeasure& mu,
                               int probe_count, std::uint64_t seed) {
    if (spec.is_infinite()) throw std::invalid_argument("euler_lagrange_residual: alpha must be finite");
    double m_supp = std::numeric_limits<double>::infinity();
    double m_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < mu.size(); ++i) {
        const double v = potential(spec, mu, mu.atom(i));
        m_supp = std::min(m_supp, v);
        m_max = std::max(m_max, v);
    }
    Rng rng(seed);
    for (int k = 0; k < probe_count; ++k) {
        const SpherePoint x = SpherePoint::from_unnormalized(rng.sphere_vector(mu.dim() + 1));
        m_max = std::max(m_max, potential(spec, mu, x));
    }
    return std::max(0.0, m_max - m_supp);
}

namespace {

double simpson(double a, double b, int intervals, const std::function<double(double)>& f) {
    // composite Simpson; `intervals` must be even
    const double h = (b - a) / intervals;
    detail::KahanSum acc;
    acc.add(f(a));
    acc.add(f(b));
    for (int k = 1; k < intervals; ++k) acc.add((k % 2 ? 4.0 : 2.0) * f(a + k * h));
    return acc.value() * h / 3.0;
}

}  // namespace

double uniform_energy(int d, double alpha, Convention convention) {
    if (d < 1) throw std::invalid_argument("uniform_energy: d >= 1 required");
    if (!(alpha > 0.0) || std::isinf(alpha))
        throw std::invalid_argument("uniform_energy: alpha must be finite and positive");
    // Both integrands are symmetric about the kink theta = pi/2, so one half
    // suffices. Substituting theta = (pi/2) u^2 turns the theta^alpha endpoint
    // singularity into u^{2 alpha + 1}, restoring Simpson's accuracy for
    // fractional exponents.
    const int intervals = 100000; // 10^5+1 nodes per integral
    auto theta_of = [](double u) { return 0.5 * M_PI * u * u; };
    auto numerator = [&](double u) {
        const double theta = theta_of(u);
        return std::pow(u, 2.0 * alpha + 1.0) * std::pow(std::sin(theta), d - 1) * M_PI;
    };
    auto denominator = [&](double u) {
        return u * std::pow(std::sin(theta_of(u)), d - 1) * M_PI;
    };
    const double num = simpson(0.0, 1.0, intervals, numerator);
    const double den = simpson(0.0, 1.0, intervals, denominator);
    const double half = 0.5 * num / den;
    return convention == Convention::Half ? half : 2.0 * half;
}

double kernel_sup_diff(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0) || std::isinf(alpha) || std::isinf(beta))
        throw std::invalid_argument("kernel_sup_diff: exponents must be finite and positive");
    if (alpha == beta) return 0.0;
    const double lo = std::min(alpha, beta);
    const double hi = std::max(alpha, beta);
    // s^lo - s^hi is maximized where lo*s^{lo-1} = hi*s^{hi-1}.
    const double s = std::pow(lo / hi, 1.0 / (hi - lo));
    const double interior = std::pow(s, lo) - std::pow(s, hi);
    return std::max(interior, 0.0);
}

std::vector<TangentVector> energy_gradient(const KernelSpec& spec, const DiscreteMeasure& mu) {
    if (spec.is_infinite()) throw std::invalid_argument("energy_gradient: alpha must be finite");
    const Matrix& p = mu.points();
    const int n = mu.size();
    std::vector<TangentVector> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        Vector g = Vector::Zero(p.rows());
        const SpherePoint xi = mu.atom(i);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const KernelGradient kg = grad_kernel(spec, xi, mu.atom(j));
            g += mu.weight(i) * mu.weight(j) * kg.tangent.vec();
        }
        out.emplace_back(xi, std::move(g));
    }
    return out;
}

}  // namespace projang
