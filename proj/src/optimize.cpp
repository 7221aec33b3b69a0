#include "projang/optimize.hpp"

#include "projang/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <numeric>
#include <optional>

namespace projang {

namespace {

constexpr double kStepUnderflow = 1e-14;

Matrix step_points(const Matrix& points, const std::vector<TangentVector>& grads, double step) {
    Matrix out(points.rows(), points.cols());
    for (int i = 0; i < points.cols(); ++i) {
        const Vector v = step * grads[i].vec();
        const double len = v.norm();
        if (len >= M_PI) return Matrix(); // outside exp injectivity; caller halves the step
        if (len == 0.0) {
            out.col(i) = points.col(i);
        } else {
            out.col(i) = points.col(i) * std::cos(len) + (v / len) * std::sin(len);
            out.col(i) /= out.col(i).norm();
        }
    }
    return out;
}

struct RestartOutcome {
    std::optional<DiscreteMeasure> measure;
    double energy = 0.0;
    int iterations = 0;
    bool converged = false;
};

RestartOutcome run_restart(int d, int N, const KernelSpec& spec, const AscentOptions& opts,
                           int restart_index) {
    Rng rng = Rng::derive(opts.seed, static_cast<std::uint64_t>(restart_index));
    Matrix points(d + 1, N);
    for (int j = 0; j < N; ++j) points.col(j) = rng.sphere_vector(d + 1);
    DiscreteMeasure mu = DiscreteMeasure::uniform(points);
    double e = energy_value(spec, mu, Convention::Half);

    int it = 0;
    bool converged = false;
    int stagnant = 0;
    for (; it < opts.max_iters; ++it) {
        const std::vector<TangentVector> grads = energy_gradient(spec, mu);
        double gmax = 0.0;
        for (const auto& g : grads) gmax = std::max(gmax, g.norm());
        if (gmax < opts.grad_tol) {
            converged = true;
            break;
        }
        // Backtracking halving; accept any step that does not decrease energy.
        double step = opts.initial_step;
        bool accepted = false;
        while (step >= kStepUnderflow) {
            const Matrix cand = step_points(mu.points(), grads, step);
            if (cand.size() != 0) {
                DiscreteMeasure next(cand, mu.weights());
                const double e_next = energy_value(spec, next, Convention::Half);
                if (e_next >= e) {
                    stagnant = (e_next - e < opts.energy_tol) ? stagnant + 1 : 0;
                    mu = std::move(next);
                    e = e_next;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted || stagnant >= 50) {
            converged = true;
            break;
        }
    }
    return {std::move(mu), e, it, converged};
}

}  // namespace

AscentResult maximize_particles(int d, int N, double alpha, const AscentOptions& opts) {
    opts.validate();
    if (d < 1 || N < 2) throw std::invalid_argument("maximize_particles: d >= 1 and N >= 2 required");
    if (!(alpha > 0.0) || std::isinf(alpha))
        throw std::invalid_argument("maximize_particles: alpha must be finite and positive");
    const KernelSpec spec = KernelSpec::lambda_power(alpha);

    std::vector<RestartOutcome> outcomes(opts.restarts);
    const int workers = std::min(opts.threads, opts.restarts);
    if (workers <= 1) {
        for (int k = 0; k < opts.restarts; ++k) outcomes[k] = run_restart(d, N, spec, opts, k);
    } else {
        std::atomic<int> next{0};
        std::vector<std::future<void>> pool;
        for (int w = 0; w < workers; ++w)
            pool.push_back(std::async(std::launch::async, [&] {
                for (int k = next.fetch_add(1); k < opts.restarts; k = next.fetch_add(1))
                    outcomes[k] = run_restart(d, N, spec, opts, k);
            }));
        for (auto& f : pool) f.get();
    }

    AscentResult result{*outcomes[0].measure, outcomes[0].energy, {}, {}, {}};
    for (int k = 0; k < opts.restarts; ++k) {
        result.per_restart_energies.push_back(outcomes[k].energy);
        result.iterations.push_back(outcomes[k].iterations);
        result.converged_flags.push_back(outcomes[k].converged);
        if (outcomes[k].energy > result.best_energy) {
            result.best_energy = outcomes[k].energy;
            result.best = *outcomes[k].measure;
        }
    }
    return result;
}

namespace detail {

Vector project_to_simplex(Vector v) {
    const int n = static_cast<int>(v.size());
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumulative = 0.0;
    double tau = 0.0;
    for (int k = 0; k < n; ++k) {
        cumulative += u[k];
        const double candidate = (cumulative - 1.0) / (k + 1);
        if (u[k] - candidate > 0.0) tau = candidate;
    }
    for (int i = 0; i < n; ++i) v[i] = std::max(v[i] - tau, 0.0);
    const double total = v.sum();
    if (total > 0.0) v /= total; // guard against accumulated roundoff
    return v;
}

}  // namespace detail

DiscreteMeasure maximize_weights(const std::vector<SpherePoint>& support, double alpha, int iters) {
    if (support.empty()) throw std::invalid_argument("maximize_weights: empty support");
    if (!(alpha > 0.0) || std::isinf(alpha))
        throw std::invalid_argument("maximize_weights: alpha must be finite and positive");
    const int n = static_cast<int>(support.size());
    Matrix points(support[0].ambient_dim(), n);
    for (int i = 0; i < n; ++i) points.col(i) = support[i].coords();

    bool orthogonal = true;
    Matrix kernel = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double dot = points.col(i).dot(points.col(j));
            if (std::abs(dot) > 1e-9) orthogonal = false;
            kernel(i, j) = kernel(j, i) =
                detail::kernel_from_dot(KernelSpec::lambda_power(alpha), dot);
        }
    if (orthogonal || n == 1)
        return DiscreteMeasure(points, Vector::Constant(n, 1.0 / n));

    const double row_max = kernel.cwiseAbs().rowwise().sum().maxCoeff();
    const double step = row_max > 0.0 ? 1.0 / (2.0 * row_max) : 1.0;
    Vector w = Vector::Constant(n, 1.0 / n);
    for (int it = 0; it < iters; ++it) w = detail::project_to_simplex(w + step * (kernel * w));
    return DiscreteMeasure(points, w);
}

namespace {

ThresholdSample evaluate_alpha(int d, int N, double alpha, const AscentOptions& opts,
                               const DiscreteMeasure& psi, double margin, double eq_tol) {
    const double conj = conjectured_value(d, N, Convention::Half);
    AscentResult run = maximize_particles(d, N, alpha, opts);
    // psi_N itself is always a feasible candidate; the scan never reports a
    // best below the known configuration's energy.
    DiscreteMeasure best = run.best_energy >= conj ? run.best : psi;
    const double best_energy = std::max(run.best_energy, conj);

    ThresholdSample sample{alpha, best_energy, conj, ThresholdVerdict::Tie};
    if (best_energy > conj + margin) {
        sample.verdict = ThresholdVerdict::Below;
    } else if (essentially_equivalent(best, psi, eq_tol).equivalent) {
        sample.verdict = ThresholdVerdict::Above;
    }
    return sample;
}

}  // namespace

ThresholdEstimate estimate_threshold(int d, int N, double alpha_lo, double alpha_hi,
                                     double alpha_tol, const AscentOptions& opts) {
    opts.validate();
    if (!(alpha_lo < alpha_hi) || !(alpha_lo > 0.0))
        throw std::invalid_argument("estimate_threshold: need 0 < alpha_lo < alpha_hi");
    if (!(alpha_tol > 0.0)) throw std::invalid_argument("estimate_threshold: alpha_tol must be positive");

    ThresholdEstimate est;
    est.d = d;
    est.N = N;
    est.alpha_lo = alpha_lo;
    est.alpha_hi = alpha_hi;
    est.tolerance = alpha_tol;
    if (N <= d + 1) {
        // Orthogonal placement is available for every point: optimal for all alpha.
        est.trivial = true;
        est.alpha_hi = alpha_lo;
        return est;
    }

    const double margin = 1e-7;
    const double eq_tol = 1e-6;
    const DiscreteMeasure psi = fejes_toth_config(d, N);

    ThresholdSample top = evaluate_alpha(d, N, alpha_hi, opts, psi, margin, eq_tol);
    est.samples.push_back(top);
    if (top.verdict != ThresholdVerdict::Above) {
        // The bracket's upper end should already be past the threshold; widen
        // once before giving up.
        est.widened = true;
        est.alpha_hi = alpha_hi + (alpha_hi - alpha_lo);
        top = evaluate_alpha(d, N, est.alpha_hi, opts, psi, margin, eq_tol);
        est.samples.push_back(top);
        if (top.verdict != ThresholdVerdict::Above)
            throw ThresholdInconsistency("estimate_threshold: upper bracket is not above the threshold");
    }

    ThresholdSample bottom = evaluate_alpha(d, N, est.alpha_lo, opts, psi, margin, eq_tol);
    est.samples.push_back(bottom);
    if (bottom.verdict == ThresholdVerdict::Above) {
        // Entire bracket sits above the threshold.
        est.alpha_hi = est.alpha_lo;
        return est;
    }

    while (est.alpha_hi - est.alpha_lo > alpha_tol) {
        const double mid = 0.5 * (est.alpha_lo + est.alpha_hi);
        const ThresholdSample sample = evaluate_alpha(d, N, mid, opts, psi, margin, eq_tol);
        est.samples.push_back(sample);
        if (sample.verdict == ThresholdVerdict::Above)
            est.alpha_hi = mid;
        else
            est.alpha_lo = mid;
    }
    return est;
}

StabilityReport stability_experiment(const DiscreteMeasure& xi_hat, double alpha, double r,
                                     int k_split, int trials, std::uint64_t seed) {
    if (!is_in_PDelta(xi_hat)) throw std::invalid_argument("stability_experiment: xi_hat not in P_Delta");
    if (!(alpha > 1.0) || std::isinf(alpha))
        throw std::invalid_argument("stability_experiment: alpha must be finite and > 1");
    if (!(r > 0.0) || r >= M_PI / 4.0)
        throw std::invalid_argument("stability_experiment: need 0 < r < pi/4");
    if (k_split < 1 || trials < 1)
        throw std::invalid_argument("stability_experiment: k_split, trials >= 1 required");

    const KernelSpec spec = KernelSpec::lambda_power(alpha);
    const double base = energy_value(spec, xi_hat, Convention::Half);
    const int d = xi_hat.dim();

    StabilityReport report;
    report.trials = trials;
    report.radius = r;
    report.alpha = alpha;

    for (int t = 0; t < trials; ++t) {
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(t));
        Matrix points(d + 1, xi_hat.size() * k_split);
        Vector weights(xi_hat.size() * k_split);
        int col = 0;
        for (int a = 0; a < xi_hat.size(); ++a) {
            const Vector sub = rng.simplex_vector(k_split);
            for (int f = 0; f < k_split; ++f, ++col) {
                // Fragment displacement: uniform direction in the tangent
                // space, radius sampled ball-uniformly, always below r.
                Vector g = rng.gaussian_vector(d + 1);
                g -= g.dot(xi_hat.points().col(a)) * xi_hat.points().col(a);
                const double gn = g.norm();
                const double len = r * std::pow(rng.uniform(), 1.0 / d) * 0.999999;
                if (gn > 1e-12 && len > 0.0) {
                    const Vector dir = g / gn;
                    points.col(col) =
                        xi_hat.points().col(a) * std::cos(len) + dir * std::sin(len);
                    points.col(col) /= points.col(col).norm();
                } else {
                    points.col(col) = xi_hat.points().col(a);
                }
                weights[col] = xi_hat.weight(a) * sub[f];
            }
        }
        const DiscreteMeasure xi(std::move(points), std::move(weights));
        const double gain = energy_value(spec, xi, Convention::Half) - base;
        report.max_energy_gain = std::max(report.max_energy_gain, gain);
        if (gain > 1e-12) ++report.violations;
    }
    return report;
}

namespace {

double cap_F(const std::vector<DiscreteMeasure>& nus, const Vector& x) {
    double total = 0.0;
    for (const auto& nu : nus)
        for (int k = 0; k < nu.size(); ++k)
            total += nu.weight(k) * (1.0 - detail::lambda_from_dot(x.dot(nu.points().col(k))));
    return total;
}

// Pull x back into the closed cap of radius r around e0 along the geodesic.
Vector clamp_to_cap(const Vector& x, const Vector& e0, double r) {
    const double theta = std::acos(detail::clamp_unit(x.dot(e0)));
    if (theta <= r) return x;
    Vector perp = x - x.dot(e0) * e0;
    const double pn = perp.norm();
    if (pn < 1e-15) return e0;
    return (e0 * std::cos(r) + (perp / pn) * std::sin(r)).normalized();
}

}  // namespace

AggregationReport aggregation_constant(const std::vector<DiscreteMeasure>& nu_list, double r,
                                       double c_target, int sample_count, std::uint64_t seed) {
    if (nu_list.empty()) throw std::invalid_argument("aggregation_constant: empty measure list");
    if (!(r > 0.0) || r >= M_PI / 4.0) throw std::invalid_argument("aggregation_constant: need 0 < r < pi/4");
    if (!(c_target > 0.0) || !(c_target < 2.0 / M_PI))
        throw std::invalid_argument("aggregation_constant: c_target must lie in (0, 2/pi)");
    if (sample_count < 1) throw std::invalid_argument("aggregation_constant: sample_count >= 1 required");

    const int d = static_cast<int>(nu_list.size());
    for (int i = 0; i < d; ++i) {
        if (nu_list[i].dim() != d)
            throw std::invalid_argument("aggregation_constant: measures must live on S^d with d = list size");
        const SpherePoint center = SpherePoint::basis(d, i + 1);
        for (int k = 0; k < nu_list[i].size(); ++k)
            if (geodesic_distance(nu_list[i].atom(k), center) >= r)
                throw std::invalid_argument("aggregation_constant: nu_i has mass outside its cap");
    }

    const Vector e0 = SpherePoint::basis(d, 0).coords();
    Rng rng(seed);

    // Multistart descent of F over the cap; F is piecewise smooth with an
    // l1-type cone at its minimizer, so halving line search converges fast.
    Vector best_x = e0;
    double best_f = cap_F(nu_list, e0);
    for (int start = 0; start < 9; ++start) {
        Vector x = e0;
        if (start > 0) {
            Vector g = rng.gaussian_vector(d + 1);
            g -= g.dot(e0) * e0;
            if (g.norm() > 1e-12) {
                const double len = r * std::pow(rng.uniform(), 1.0 / d);
                x = (e0 * std::cos(len) + (g / g.norm()) * std::sin(len)).normalized();
            }
        }
        double fx = cap_F(nu_list, x);
        const KernelSpec lin = KernelSpec::lambda_power(1.0);
        for (int it = 0; it < 400; ++it) {
            // Descent direction: -grad F = sum grad Lambda(., y).
            Vector g = Vector::Zero(d + 1);
            const SpherePoint xp = SpherePoint::from_unnormalized(x);
            for (const auto& nu : nu_list)
                for (int k = 0; k < nu.size(); ++k)
                    g += nu.weight(k) * grad_kernel(lin, xp, nu.atom(k)).tangent.vec();
            const double gn = g.norm();
            if (gn < 1e-14) break;
            double step = r;
            bool moved = false;
            while (step > 1e-12) {
                const double len = std::min(step * gn, M_PI / 2);
                Vector cand = x * std::cos(len) + (g / gn) * std::sin(len);
                cand = clamp_to_cap(cand.normalized(), e0, r);
                const double fc = cap_F(nu_list, cand);
                if (fc < fx) {
                    x = cand;
                    fx = fc;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
        }
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
    }

    double c_min = std::numeric_limits<double>::infinity();
    for (int s = 0; s < sample_count; ++s) {
        Vector g = rng.gaussian_vector(d + 1);
        g -= g.dot(e0) * e0;
        if (g.norm() < 1e-12) continue;
        const double len = r * std::pow(rng.uniform(), 1.0 / d);
        Vector x = (e0 * std::cos(len) + (g / g.norm()) * std::sin(len)).normalized();
        const double dist = std::acos(detail::clamp_unit(x.dot(best_x)));
        if (dist <= 1e-8) continue;
        c_min = std::min(c_min, cap_F(nu_list, x) / dist);
    }
    const double c_empirical = std::isfinite(c_min) ? c_min : 0.0;
    return AggregationReport{SpherePoint::from_unnormalized(best_x), c_empirical, r,
                             sample_count, c_target, c_empirical >= c_target};
}

}  // namespace projang
