#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "projang/energy.hpp"
#include "projang/rng.hpp"

#include <cmath>

using namespace projang;

namespace {

// Independent oracle: direct ordered-pair sum without the library's
// accumulation or kernel helpers.
double pair_sum_energy(const DiscreteMeasure& mu, double alpha) {
    double total = 0.0;
    for (int i = 0; i < mu.size(); ++i)
        for (int j = 0; j < mu.size(); ++j) {
            if (i == j) continue; // Lambda(x, x) = 0 identically
            const double dot = mu.points().col(i).dot(mu.points().col(j));
            const double lam = (2.0 / M_PI) * std::acos(std::min(1.0, std::abs(dot)));
            total += mu.weight(i) * mu.weight(j) * std::pow(lam, alpha);
        }
    return 0.5 * total;
}

DiscreteMeasure random_orthogonal_image(const DiscreteMeasure& mu, Rng& rng) {
    const int n = mu.dim() + 1;
    Matrix g(n, n);
    for (int i = 0; i < n; ++i) g.col(i) = rng.gaussian_vector(n);
    const Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    return mu.rotated(q);
}

// Measure on S^1 invariant (projectively) under rotation by pi/2.
DiscreteMeasure quarter_turn_symmetrized(int n_atoms, std::uint64_t seed) {
    Rng rng(seed);
    Matrix p(2, 2 * n_atoms);
    Vector w(2 * n_atoms);
    const Vector base_w = rng.simplex_vector(n_atoms);
    for (int k = 0; k < n_atoms; ++k) {
        const double theta = rng.uniform(0.0, 2.0 * M_PI);
        p(0, 2 * k) = std::cos(theta);
        p(1, 2 * k) = std::sin(theta);
        p(0, 2 * k + 1) = -std::sin(theta);
        p(1, 2 * k + 1) = std::cos(theta);
        w[2 * k] = 0.5 * base_w[k];
        w[2 * k + 1] = 0.5 * base_w[k];
    }
    return DiscreteMeasure(p, w);
}

}  // namespace

TEST_CASE("bilinear form basics") {
    const KernelSpec spec = KernelSpec::lambda_power(2.0);
    const DiscreteMeasure dx = DiscreteMeasure::dirac(SpherePoint::basis(2, 0));
    const DiscreteMeasure dy = DiscreteMeasure::dirac(SpherePoint::basis(2, 1));
    CHECK(bilinear_form(spec, dx, dy) == doctest::Approx(1.0));
    CHECK(bilinear_form(spec, dx, dx) == 0.0);

    // 6 ordered cross pairs x (1/9), independent of alpha
    for (double alpha : {0.5, 1.0, 2.0, 7.5}) {
        const DiscreteMeasure mu = equidistributed_basis(2);
        CHECK(bilinear_form(KernelSpec::lambda_power(alpha), mu, mu) ==
              doctest::Approx(2.0 / 3).epsilon(1e-14));
    }
    CHECK_THROWS(bilinear_form(spec, dx, DiscreteMeasure::dirac(SpherePoint::basis(1, 0))));
}

TEST_CASE("energy conventions and reference values") {
    const DiscreteMeasure mu2 = equidistributed_basis(2);
    CHECK(energy_value(KernelSpec::lambda_power(2.0), mu2, Convention::Half) ==
          doctest::Approx(1.0 / 3).epsilon(1e-14));

    // psi_3 on S^1: ordered pair count (9 - 5)/18
    const DiscreteMeasure psi = fejes_toth_config(1, 3);
    for (double alpha : {1.0, 2.0, 3.5})
        CHECK(energy_value(KernelSpec::lambda_power(alpha), psi, Convention::Half) ==
              doctest::Approx(2.0 / 9).epsilon(1e-14));

    // quadratic kernel on the equidistributed basis, Plain convention
    for (int d = 1; d <= 3; ++d)
        CHECK(energy_value(KernelSpec::quadratic_g(), equidistributed_basis(d), Convention::Plain) ==
              doctest::Approx(static_cast<double>(d) / (d + 1)).epsilon(1e-14));

    // Plain is exactly twice Half
    Rng rng(3);
    for (int k = 0; k < 50; ++k) {
        const DiscreteMeasure mu = random_configuration(2, 6, 100 + k, true);
        const KernelSpec spec = KernelSpec::lambda_power(rng.uniform(0.5, 4.0));
        CHECK(energy_value(spec, mu, Convention::Plain) ==
              2.0 * energy_value(spec, mu, Convention::Half));
        CHECK(energy_value(spec, mu, Convention::Half) ==
              doctest::Approx(pair_sum_energy(mu, spec.alpha)).epsilon(1e-13));
    }

    const EnergyReport report = energy(KernelSpec::lambda_power(2.0), mu2, Convention::Plain);
    CHECK(report.value == doctest::Approx(2.0 / 3));
    CHECK(report.convention == Convention::Plain);
}

TEST_CASE("conjectured values") {
    CHECK(conjectured_value_infinite(2) == doctest::Approx(1.0 / 3));
    CHECK(conjectured_value_infinite(1) == doctest::Approx(0.25));
    CHECK(conjectured_value(1, 3) == doctest::Approx(2.0 / 9));
    CHECK(conjectured_value(2, 6) == doctest::Approx(1.0 / 3));
    CHECK(conjectured_value(2, 3) == doctest::Approx(1.0 / 3));
    CHECK(conjectured_value(3, 4) == doctest::Approx(3.0 / 8));
    CHECK_THROWS(conjectured_value(2, 2));

    // combinatorial oracle: energy of the actual configuration
    for (int d = 1; d <= 3; ++d)
        for (int N = d + 1; N <= 14; ++N)
            CHECK(conjectured_value(d, N) ==
                  doctest::Approx(energy_value(KernelSpec::lambda_power(2.0), fejes_toth_config(d, N)))
                      .epsilon(1e-13));
}

TEST_CASE("potential") {
    const KernelSpec spec = KernelSpec::lambda_power(3.0);
    for (int d = 1; d <= 3; ++d)
        CHECK(potential(spec, equidistributed_basis(d), SpherePoint::basis(d, 0)) ==
              doctest::Approx(static_cast<double>(d) / (d + 1)).epsilon(1e-14));

    const DiscreteMeasure dy = DiscreteMeasure::dirac(SpherePoint::basis(1, 1));
    CHECK(potential(spec, dy, SpherePoint::basis(1, 0)) == doctest::Approx(1.0));
    CHECK(potential(spec, dy, SpherePoint::basis(1, 1)) == 0.0);
}

TEST_CASE("euler lagrange residual") {
    const KernelSpec spec = KernelSpec::lambda_power(2.0);
    // the equidistributed basis maximizes its own potential on its support
    for (int d = 1; d <= 2; ++d)
        CHECK(euler_lagrange_residual(spec, equidistributed_basis(d), 5000, 17) <= 1e-9);

    // single atom: potential 0 at the atom, 1 on its equator
    const DiscreteMeasure dx = DiscreteMeasure::dirac(SpherePoint::basis(2, 0));
    CHECK(euler_lagrange_residual(spec, dx, 20000, 19) == doctest::Approx(1.0).epsilon(1e-3));

    // probe_count = 0 restricts to the support
    CHECK(euler_lagrange_residual(spec, dx, 0, 0) == 0.0);
}

TEST_CASE("uniform energy quadrature") {
    // closed form on S^1: 1/(2(alpha+1))
    CHECK(uniform_energy(1, 1.0) == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(uniform_energy(1, 3.0) == doctest::Approx(0.125).epsilon(1e-9));
    for (double alpha : {0.5, 2.0, 4.5})
        CHECK(uniform_energy(1, alpha) == doctest::Approx(0.5 / (alpha + 1)).epsilon(1e-9));

    // closed form on S^2, alpha = 2: (2/pi^2)(pi - 2)
    CHECK(uniform_energy(2, 2.0) == doctest::Approx(2.0 * (M_PI - 2.0) / (M_PI * M_PI)).epsilon(1e-9));

    // Monte Carlo cross-check
    Rng rng(101);
    detail::KahanSum mc;
    const int samples = 200000;
    for (int k = 0; k < samples; ++k) {
        const Vector x = rng.sphere_vector(3);
        const Vector y = rng.sphere_vector(3);
        mc.add(detail::kernel_from_dot(KernelSpec::lambda_power(2.0), x.dot(y)));
    }
    const double mc_value = 0.5 * mc.value() / samples;
    CHECK(std::abs(uniform_energy(2, 2.0) - mc_value) < 3.0 * 0.5 / std::sqrt(samples));
}

TEST_CASE("kernel sup diff") {
    CHECK(kernel_sup_diff(2.0, 2.0) == 0.0);
    CHECK(kernel_sup_diff(1.0, 2.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(kernel_sup_diff(2.0, 1.0) == doctest::Approx(0.25).epsilon(1e-14));

    // grid oracle
    Rng rng(7);
    for (int k = 0; k < 20; ++k) {
        const double a = rng.uniform(0.3, 5.0);
        const double b = rng.uniform(0.3, 5.0);
        double grid_max = 0.0;
        for (int i = 0; i <= 100000; ++i) {
            const double s = i / 100000.0;
            grid_max = std::max(grid_max, std::abs(std::pow(s, a) - std::pow(s, b)));
        }
        CHECK(kernel_sup_diff(a, b) >= grid_max - 1e-12);
        CHECK(kernel_sup_diff(a, b) <= grid_max + 1e-6);
    }

    // integral bound |E_a - E_b| <= sup diff / 2 in the Half convention
    for (int k = 0; k < 100; ++k) {
        const DiscreteMeasure mu = random_configuration(2, 5, 500 + k, true);
        const double a = rng.uniform(0.5, 4.0);
        const double b = rng.uniform(0.5, 4.0);
        const double gap = std::abs(energy_value(KernelSpec::lambda_power(a), mu) -
                                    energy_value(KernelSpec::lambda_power(b), mu));
        CHECK(gap <= 0.5 * kernel_sup_diff(a, b) + 1e-12);
    }
}

TEST_CASE("energy gradient matches finite differences") {
    const KernelSpec spec = KernelSpec::lambda_power(2.0);

    // stationary at the equidistributed basis (kink policy)
    for (int d = 1; d <= 3; ++d)
        for (const TangentVector& g : energy_gradient(spec, equidistributed_basis(d)))
            CHECK(g.norm() <= 1e-12);

    // single atom
    CHECK(energy_gradient(spec, DiscreteMeasure::dirac(SpherePoint::basis(2, 0)))[0].norm() == 0.0);

    // two atoms on S^1 at angle pi/4: finite-difference oracle
    Matrix p(2, 2);
    p.col(0) = SpherePoint::basis(1, 0).coords();
    p(0, 1) = std::cos(M_PI / 4);
    p(1, 1) = std::sin(M_PI / 4);
    const DiscreteMeasure two = DiscreteMeasure::uniform(p);
    const std::vector<TangentVector> grads = energy_gradient(spec, two);
    const double h = 1e-6;
    for (int i = 0; i < 2; ++i) {
        if (grads[i].norm() == 0.0) continue;
        const Vector dir = grads[i].vec() / grads[i].norm();
        Matrix pp = p, pm = p;
        const SpherePoint xi = two.atom(i);
        pp.col(i) = exp_map(TangentVector(xi, h * dir)).coords();
        pm.col(i) = exp_map(TangentVector(xi, -h * dir)).coords();
        const double fd = (energy_value(spec, DiscreteMeasure::uniform(pp)) -
                           energy_value(spec, DiscreteMeasure::uniform(pm))) /
                          (2 * h);
        const double analytic = grads[i].vec().dot(dir);
        CHECK(std::abs(analytic - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }

    // random measures, random atoms, random directions
    Rng rng(31);
    int checked = 0;
    int attempt = 0;
    while (checked < 300) {
        ++attempt;
        const int d = 1 + static_cast<int>(rng.uniform_index(2));
        const int n = 3 + static_cast<int>(rng.uniform_index(4));
        const DiscreteMeasure mu = random_configuration(d, n, 9000 + attempt, true);
        const double alpha = rng.uniform(1.2, 4.0);
        const KernelSpec sp = KernelSpec::lambda_power(alpha);

        // skip configurations with a pair too close to the kink or coincidence
        bool safe = true;
        for (int i = 0; i < n && safe; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double rho = geodesic_distance(mu.atom(i), mu.atom(j));
                if (rho < 0.01 || std::abs(rho - M_PI / 2) < 0.01 || rho > M_PI - 0.01) {
                    safe = false;
                    break;
                }
            }
        if (!safe) continue;

        const std::vector<TangentVector> gs = energy_gradient(sp, mu);
        const int i = static_cast<int>(rng.uniform_index(n));
        Vector dir = rng.gaussian_vector(d + 1);
        dir -= dir.dot(mu.points().col(i)) * mu.points().col(i);
        if (dir.norm() < 1e-8) continue;
        dir /= dir.norm();

        Matrix pp = mu.points(), pm = mu.points();
        const SpherePoint xi = mu.atom(i);
        pp.col(i) = exp_map(TangentVector(xi, h * dir)).coords();
        pm.col(i) = exp_map(TangentVector(xi, -h * dir)).coords();
        const double fd = (energy_value(sp, DiscreteMeasure(pp, mu.weights())) -
                           energy_value(sp, DiscreteMeasure(pm, mu.weights()))) /
                          (2 * h);
        const double analytic = gs[i].vec().dot(dir);
        const double scale = std::max({std::abs(fd), std::abs(analytic), 1e-8});
        CHECK(std::abs(analytic - fd) / scale < 1e-5);
        ++checked;
    }
}

TEST_CASE("energy monotone in alpha and rotation invariant") {
    Rng rng(41);
    for (int k = 0; k < 100; ++k) {
        const DiscreteMeasure mu = random_configuration(2, 5, 2000 + k, true);
        const double a = rng.uniform(0.3, 3.0);
        const double b = a + rng.uniform(0.1, 2.0);
        const double ea = energy_value(KernelSpec::lambda_power(a), mu);
        const double eb = energy_value(KernelSpec::lambda_power(b), mu);
        CHECK(eb < ea); // strict: random support is never pairwise orthogonal

        const DiscreteMeasure rotated = random_orthogonal_image(mu, rng);
        CHECK(std::abs(energy_value(KernelSpec::lambda_power(a), rotated) - ea) <= 1e-12);
    }
}

TEST_CASE("upper bound for alpha >= 2") {
    Rng rng(43);
    for (int k = 0; k < 1000; ++k) {
        const int d = 1 + static_cast<int>(rng.uniform_index(3));
        const int n = 2 + static_cast<int>(rng.uniform_index(7));
        const DiscreteMeasure mu = random_configuration(d, n, 3000 + k, k % 2 == 0);
        const double alpha = rng.uniform(2.0, 6.0);
        CHECK(energy_value(KernelSpec::lambda_power(alpha), mu) <=
              static_cast<double>(d) / (2 * d + 2) + 1e-12);
    }
}

TEST_CASE("d=1 alpha=1 energy is constant on quarter-turn symmetric measures") {
    for (int k = 0; k < 100; ++k) {
        const DiscreteMeasure mu = quarter_turn_symmetrized(3 + k % 5, 4000 + k);
        CHECK(std::abs(energy_value(KernelSpec::lambda_power(1.0), mu) - 0.25) <= 1e-9);
    }
}

TEST_CASE("infinite alpha kernel energies on discrete measures") {
    const KernelSpec inf = KernelSpec::lambda_infinity();
    CHECK(energy_value(inf, equidistributed_basis(2), Convention::Half) ==
          doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(energy_value(inf, random_configuration(2, 4, 8)) == 0.0);
}
