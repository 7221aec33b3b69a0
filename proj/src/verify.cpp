#include "projang/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace projang {

namespace {

// h(t) = (1 - t^2) - ((2/pi) arccos|t|)^alpha, with 1 - t^2 factored to keep
// full precision near the endpoints.
double majorization_gap(double t, double alpha) {
    const double g = (1.0 - t) * (1.0 + t);
    const double f = std::pow((2.0 / M_PI) * std::acos(detail::clamp_unit(std::abs(t))), alpha);
    return g - f;
}

}  // namespace

MajorizationReport majorization_check(double alpha, int grid_size) {
    if (!(alpha > 0.0)) throw std::invalid_argument("majorization_check: alpha must be positive");
    if (grid_size < 1000) throw std::invalid_argument("majorization_check: grid_size >= 1000 required");

    MajorizationReport report;
    report.alpha = alpha;
    report.min_gap = std::numeric_limits<double>::infinity();

    auto visit = [&](double t) {
        const double h = majorization_gap(t, alpha);
        if (h < report.min_gap) {
            report.min_gap = h;
            report.argmin_t = t;
        }
        if (h < -1e-12 && std::abs(t) > std::abs(report.outermost_violation_t))
            report.outermost_violation_t = t;
        if (std::abs(h) <= 1e-9) report.equality_points.push_back(t);
    };

    visit(-1.0);
    visit(0.0);
    visit(1.0);
    for (int k = 0; k <= grid_size; ++k) visit(-1.0 + 2.0 * k / grid_size);
    // The violation region for alpha slightly below 2 has width on the order
    // of (2/pi)^{2 alpha/(2 - alpha)} next to |t| = 1; a dyadic refinement
    // reaches it where no affordable uniform grid does.
    for (int k = 1; k <= 52; ++k) {
        const double t = 1.0 - std::ldexp(1.0, -k);
        visit(t);
        visit(-t);
    }

    bool equalities_at_corners_only = true;
    for (double t : report.equality_points) {
        const double to_corner =
            std::min({std::abs(t + 1.0), std::abs(t), std::abs(t - 1.0)});
        if (to_corner > 1e-6) {
            equalities_at_corners_only = false;
            break;
        }
    }
    report.pass = report.min_gap >= -1e-12 && equalities_at_corners_only;
    return report;
}

MomentMatrix moment_matrix(const DiscreteMeasure& mu) {
    const Matrix& p = mu.points();
    Matrix m = p * mu.weights().asDiagonal() * p.transpose();
    return {0.5 * (m + m.transpose())};
}

FrameBoundReport frame_bound_check(const DiscreteMeasure& mu) {
    const MomentMatrix I = moment_matrix(mu);
    FrameBoundReport report;
    report.tr_I2 = (I.entries * I.entries).trace();
    report.lower_bound = 1.0 / (mu.dim() + 1);
    report.tight = std::abs(report.tr_I2 - report.lower_bound) <= 1e-9;
    const double e_g = energy_value(KernelSpec::quadratic_g(), mu, Convention::Plain);
    report.energy_identity_gap = std::abs(e_g - (1.0 - report.tr_I2));
    return report;
}

ChainReport chain_check(const DiscreteMeasure& mu, double alpha) {
    if (!(alpha >= 2.0)) throw std::invalid_argument("chain_check: requires alpha >= 2");
    ChainReport report;
    report.e_f = energy_value(KernelSpec::lambda_power(alpha), mu, Convention::Plain);
    report.e_g = energy_value(KernelSpec::quadratic_g(), mu, Convention::Plain);
    report.e_g_sigma = static_cast<double>(mu.dim()) / (mu.dim() + 1);
    report.pass = report.e_f <= report.e_g + 1e-12 && report.e_g <= report.e_g_sigma + 1e-12;
    return report;
}

}  // namespace projang
