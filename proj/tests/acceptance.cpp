// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include "projang/energy.hpp"
#include "projang/equivalence.hpp"
#include "projang/optimize.hpp"
#include "projang/rng.hpp"
#include "projang/transport.hpp"
#include "projang/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace projang;

namespace {

int failures = 0;

void criterion(int number, const std::string& label, double time_limit_s,
               const std::function<bool(std::string&)>& body) {
    std::string detail;
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > time_limit_s) {
        ok = false;
        detail += (detail.empty() ? "" : "; ") + std::string("over time limit");
    }
    if (!ok) ++failures;
    std::printf("[%s] %d. %s (%.2f s%s%s)\n", ok ? "PASS" : "FAIL", number, label.c_str(), elapsed,
                detail.empty() ? "" : ": ", detail.c_str());
    std::fflush(stdout);
}

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

Matrix random_orthogonal(Rng& rng, int n) {
    Matrix g(n, n);
    for (int i = 0; i < n; ++i) g.col(i) = rng.gaussian_vector(n);
    return Eigen::HouseholderQR<Matrix>(g).householderQ();
}

}  // namespace

int main() {
    criterion(1, "optimal value reproduction at alpha = 2.5, N = d+1", 30.0, [](std::string& detail) {
        bool ok = true;
        std::ostringstream os;
        for (int d = 1; d <= 3; ++d) {
            AscentOptions opts;
            opts.restarts = 16;
            opts.seed = 1000 + d;
            const auto start = std::chrono::steady_clock::now();
            const AscentResult res = maximize_particles(d, d + 1, 2.5, opts);
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            const double target = static_cast<double>(d) / (2 * d + 2);
            const double gap = std::abs(res.best_energy - target);
            os << "d=" << d << " gap=" << gap << " t=" << elapsed << "s ";
            ok = ok && gap <= 1e-6 && elapsed < 10.0;
        }
        detail = os.str();
        return ok;
    });

    criterion(2, "divisible-N threshold: d=2, N=6, alpha=2", 60.0, [](std::string& detail) {
        AscentOptions opts;
        opts.restarts = 32;
        opts.seed = 2024;
        const AscentResult res = maximize_particles(2, 6, 2.0, opts);
        const double gap = std::abs(res.best_energy - 1.0 / 3);
        const bool matches = essentially_equivalent(res.best, fejes_toth_config(2, 6), 1e-5).equivalent;
        std::ostringstream os;
        os << "gap=" << gap << " basis_support=" << (matches ? "yes" : "no");
        detail = os.str();
        return gap <= 1e-6 && matches;
    });

    criterion(3, "majorization suite over the alpha grid", 5.0, [](std::string& detail) {
        bool ok = true;
        for (double alpha = 2.0; alpha <= 6.0 + 1e-9; alpha += 0.25)
            ok = ok && majorization_check(alpha, 100000).pass;
        for (double alpha : {1.0, 1.5, 1.9}) {
            const MajorizationReport rep = majorization_check(alpha, 100000);
            ok = ok && !rep.pass && (1.0 - std::abs(rep.outermost_violation_t)) <= 0.05;
        }
        detail = "17 passing + 3 failing exponents checked";
        return ok;
    });

    criterion(4, "chain suite on 300 random measures at alpha in {2, 4}", 30.0, [](std::string& detail) {
        bool ok = true;
        int equal_count = 0;
        Rng rng(4);
        for (int d = 1; d <= 3; ++d)
            for (int k = 0; k < 100; ++k) {
                DiscreteMeasure mu = random_configuration(d, 3 + k % 6, 40000 + 1000 * d + k, k % 2 == 0);
                if (k % 10 == 0) mu = equidistributed_basis(d).rotated(random_orthogonal(rng, d + 1));
                const bool is_delta_eq = classify(mu, 1e-9) == MeasureClass::PDeltaEq;
                for (double alpha : {2.0, 4.0}) {
                    const ChainReport rep = chain_check(mu, alpha);
                    ok = ok && rep.pass;
                    const bool chain_equal = std::abs(rep.e_f - rep.e_g) <= 1e-9 &&
                                             std::abs(rep.e_g - rep.e_g_sigma) <= 1e-9;
                    ok = ok && (chain_equal == is_delta_eq);
                    if (chain_equal) ++equal_count;
                }
            }
        std::ostringstream os;
        os << "600 checks, " << equal_count << " full-chain equalities (PDeltaEq only)";
        detail = os.str();
        return ok && equal_count > 0;
    });

    criterion(5, "transport sandwich and brute-force oracle", 60.0, [](std::string& detail) {
        bool ok = true;
        int oracle_checked = 0;
        for (int k = 0; k < 100; ++k) {
            const int d = 1 + k % 2;
            const int N = 2 + k % 9;
            const DiscreteMeasure a = random_configuration(d, N, 50000 + k, false);
            const DiscreteMeasure b = random_configuration(d, N, 51000 + k, false);
            const double dinf = dinf_distance(a, b).first;
            for (int p : {1, 2}) {
                const double dp = dp_distance(a, b, p).first;
                ok = ok && std::pow(N, -1.0 / p) * dinf <= dp + 1e-10 && dp <= dinf + 1e-10;
                if (N <= 7) {
                    ok = ok && dp == assignment_bruteforce(a, b, p);
                    ++oracle_checked;
                }
            }
        }
        std::ostringstream os;
        os << "100 pairs, " << oracle_checked << " exact oracle matches";
        detail = os.str();
        return ok;
    });

    criterion(6, "local stability: 0 violations across d, alpha, weights", 120.0,
              [](std::string& detail) {
                  bool ok = true;
                  int total_violations = 0;
                  std::uint64_t seed = 600;
                  for (int d = 1; d <= 3; ++d)
                      for (double alpha : {1.5, 2.0, 3.0})
                          for (int style = 0; style < 2; ++style) {
                              DiscreteMeasure target = equidistributed_basis(d);
                              if (style == 1) {
                                  Vector w = Vector::Constant(d + 1, 0.4 / d);
                                  w[0] = 0.6;
                                  target = DiscreteMeasure(Matrix::Identity(d + 1, d + 1), w);
                              }
                              const StabilityReport rep =
                                  stability_experiment(target, alpha, 0.05, 5, 1000, ++seed);
                              total_violations += rep.violations;
                              ok = ok && rep.violations == 0;
                          }
                  std::ostringstream os;
                  os << "18 configurations x 1000 trials, " << total_violations << " violations";
                  detail = os.str();
                  return ok;
              });

    criterion(7, "d=1, alpha=1 degeneracy: E_1 = 1/4 on symmetrized measures", 5.0,
              [](std::string& detail) {
                  double worst = 0.0;
                  for (int k = 0; k < 100; ++k) {
                      const DiscreteMeasure mu = quarter_turn_symmetrized(3 + k % 6, 70000 + k);
                      worst = std::max(
                          worst, std::abs(energy_value(KernelSpec::lambda_power(1.0), mu) - 0.25));
                  }
                  std::ostringstream os;
                  os << "max |E_1 - 1/4| = " << worst;
                  detail = os.str();
                  return worst <= 1e-9;
              });

    criterion(8, "frame identities: MC second moment and E_g = 1 - Tr(I^2)", 10.0,
              [](std::string& detail) {
                  const DiscreteMeasure mc = random_configuration(2, 100000, 808);
                  const MomentMatrix I = moment_matrix(mc);
                  const double tr2 = (I.entries * I.entries).trace();
                  double mean_q = 0.0, var_q = 0.0;
                  for (int k = 0; k < mc.size(); ++k)
                      mean_q += 2.0 * mc.points().col(k).dot(I.entries * mc.points().col(k));
                  mean_q /= mc.size();
                  for (int k = 0; k < mc.size(); ++k) {
                      const double q = 2.0 * mc.points().col(k).dot(I.entries * mc.points().col(k));
                      var_q += (q - mean_q) * (q - mean_q);
                  }
                  const double se = std::sqrt(var_q) / mc.size();
                  bool ok = std::abs(tr2 - 1.0 / 3) <= 3.0 * se + 1e-9;

                  double worst_gap = 0.0;
                  for (int k = 0; k < 100; ++k) {
                      const DiscreteMeasure mu =
                          random_configuration(1 + k % 3, 3 + k % 7, 80000 + k, k % 2 == 1);
                      worst_gap = std::max(worst_gap, frame_bound_check(mu).energy_identity_gap);
                  }
                  ok = ok && worst_gap <= 1e-12;
                  std::ostringstream os;
                  os << "Tr(I^2)=" << tr2 << " (3se=" << 3 * se << "), max identity gap=" << worst_gap;
                  detail = os.str();
                  return ok;
              });

    criterion(9, "gradient correctness: 1000 finite-difference checks", 10.0, [](std::string& detail) {
        Rng rng(909);
        double worst = 0.0;
        int kernel_checks = 0;
        while (kernel_checks < 500) {
            const int d = 1 + static_cast<int>(rng.uniform_index(3));
            const SpherePoint x = SpherePoint::from_unnormalized(rng.sphere_vector(d + 1));
            const SpherePoint y = SpherePoint::from_unnormalized(rng.sphere_vector(d + 1));
            const double rho = geodesic_distance(x, y);
            if (rho < 0.01 || std::abs(rho - M_PI / 2) < 0.01 || rho > M_PI - 0.01) continue;
            const KernelSpec spec = KernelSpec::lambda_power(rng.uniform(1.1, 5.0));
            const KernelGradient g = grad_kernel(spec, x, y);
            Vector dir = rng.gaussian_vector(d + 1);
            dir -= dir.dot(x.coords()) * x.coords();
            if (dir.norm() < 1e-8) continue;
            dir /= dir.norm();
            const double h = 1e-5;
            const double fd = (kernel_value(spec, exp_map(TangentVector(x, h * dir)), y) -
                               kernel_value(spec, exp_map(TangentVector(x, -h * dir)), y)) /
                              (2 * h);
            const double analytic = g.tangent.vec().dot(dir);
            const double scale = std::max({std::abs(fd), std::abs(analytic), 1e-10});
            worst = std::max(worst, std::abs(analytic - fd) / scale);
            ++kernel_checks;
        }

        int energy_checks = 0;
        int attempt = 0;
        while (energy_checks < 500) {
            ++attempt;
            const int d = 1 + static_cast<int>(rng.uniform_index(2));
            const int n = 3 + static_cast<int>(rng.uniform_index(4));
            const DiscreteMeasure mu = random_configuration(d, n, 90000 + attempt, true);
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
            const KernelSpec spec = KernelSpec::lambda_power(rng.uniform(1.2, 4.0));
            const std::vector<TangentVector> gs = energy_gradient(spec, mu);
            const int i = static_cast<int>(rng.uniform_index(n));
            Vector dir = rng.gaussian_vector(d + 1);
            dir -= dir.dot(mu.points().col(i)) * mu.points().col(i);
            if (dir.norm() < 1e-8) continue;
            dir /= dir.norm();
            const double h = 1e-6;
            Matrix pp = mu.points(), pm = mu.points();
            const SpherePoint xi = mu.atom(i);
            pp.col(i) = exp_map(TangentVector(xi, h * dir)).coords();
            pm.col(i) = exp_map(TangentVector(xi, -h * dir)).coords();
            const double fd = (energy_value(spec, DiscreteMeasure(pp, mu.weights())) -
                               energy_value(spec, DiscreteMeasure(pm, mu.weights()))) /
                              (2 * h);
            const double analytic = gs[i].vec().dot(dir);
            const double scale = std::max({std::abs(fd), std::abs(analytic), 1e-8});
            worst = std::max(worst, std::abs(analytic - fd) / scale);
            ++energy_checks;
        }
        std::ostringstream os;
        os << "worst relative error " << worst;
        detail = os.str();
        return worst < 1e-5;
    });

    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", failures);
    return 1;
}
