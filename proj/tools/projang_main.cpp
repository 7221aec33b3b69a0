// projang: projective-angle energies on spheres, batch experiments with
// machine-readable outputs. Exit codes: 0 success/pass, 1 verification
// failure, 2 usage/input error, 3 internal inconsistency.

#include <CLI11.hpp>
#include <json.hpp>

#include "projang/energy.hpp"
#include "projang/equivalence.hpp"
#include "projang/optimize.hpp"
#include "projang/rng.hpp"
#include "projang/transport.hpp"
#include "projang/verify.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using namespace projang;

constexpr const char* kVersion = "projang 1.0.0";

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

std::string fmt_file(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string fmt_term(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

struct Manifest {
    std::string command;
    std::map<std::string, std::string> parameters;
    std::uint64_t seed = 0;
    std::string started;
    std::vector<std::string> outputs;

    void write() const {
        if (outputs.empty()) return;
        nlohmann::json j;
        j["command"] = command;
        j["parameters"] = parameters;
        j["seed"] = seed;
        j["versions"] = kVersion;
        j["started"] = started;
        j["finished"] = now_iso8601();
        j["outputs"] = outputs;
        std::ofstream out(outputs.front() + ".manifest.json");
        out << j.dump(2) << "\n";
    }
};

// Optional JSON parameter file: top-level object whose keys override the
// like-named flags.
void apply_overrides(const std::string& path, const std::map<std::string, double*>& nums,
                     const std::map<std::string, std::string*>& strs) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--params", "cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    for (auto& [key, value] : j.items()) {
        if (auto it = nums.find(key); it != nums.end())
            *it->second = value.get<double>();
        else if (auto it2 = strs.find(key); it2 != strs.end())
            *it2->second = value.get<std::string>();
        else
            throw CLI::ValidationError("--params", "unknown parameter: " + key);
    }
}

Convention parse_convention(const std::string& s) {
    if (s == "half") return Convention::Half;
    if (s == "plain") return Convention::Plain;
    throw CLI::ValidationError("--convention", "must be 'half' or 'plain'");
}

TransportMetric parse_metric(const std::string& s) {
    if (s == "sphere") return TransportMetric::Sphere;
    if (s == "projective") return TransportMetric::Projective;
    throw CLI::ValidationError("--metric", "must be 'sphere' or 'projective'");
}

std::string csv_path_for(const std::string& output, const std::string& suffix) {
    const auto dot = output.rfind('.');
    const std::string stem = dot == std::string::npos ? output : output.substr(0, dot);
    return stem + suffix;
}

int cmd_energy(const std::string& file, double alpha, const std::string& convention_name) {
    const Convention conv = parse_convention(convention_name);
    const DiscreteMeasure mu = load_measure(file);
    const KernelSpec spec =
        std::isinf(alpha) ? KernelSpec::lambda_infinity() : KernelSpec::lambda_power(alpha);
    const EnergyReport rep = energy(spec, mu, conv);
    std::cout << "energy " << fmt_term(rep.value) << " convention "
              << (conv == Convention::Half ? "half" : "plain") << " kernel Lambda^"
              << (std::isinf(alpha) ? std::string("inf") : fmt_term(alpha)) << " dim " << mu.dim()
              << " atoms " << mu.size() << "\n";
    return 0;
}

int cmd_optimize(int dim, int n_points, double alpha, AscentOptions opts, const std::string& output) {
    Manifest manifest;
    manifest.command = "optimize";
    manifest.started = now_iso8601();
    manifest.seed = opts.seed;
    manifest.parameters = {{"dim", std::to_string(dim)},
                           {"n-points", std::to_string(n_points)},
                           {"alpha", fmt_file(alpha)},
                           {"restarts", std::to_string(opts.restarts)},
                           {"max-iters", std::to_string(opts.max_iters)},
                           {"seed", std::to_string(opts.seed)}};

    DiscreteMeasure best = random_configuration(dim, std::max(n_points, 1), opts.seed);
    std::vector<double> energies;
    std::vector<int> iterations;
    std::vector<bool> converged;
    double best_energy = 0.0;
    if (n_points >= 2) {
        const AscentResult res = maximize_particles(dim, n_points, alpha, opts);
        best = res.best;
        best_energy = res.best_energy;
        energies = res.per_restart_energies;
        iterations = res.iterations;
        converged = res.converged_flags;
    } else {
        energies = {0.0};
        iterations = {0};
        converged = {true};
    }

    save_measure(best, output);
    manifest.outputs.push_back(output);

    const std::string csv = csv_path_for(output, "_restarts.csv");
    std::ofstream cs(csv);
    cs << "restart,final_energy,iterations,converged\n";
    for (size_t k = 0; k < energies.size(); ++k)
        cs << k << "," << fmt_file(energies[k]) << "," << iterations[k] << ","
           << (converged[k] ? 1 : 0) << "\n";
    manifest.outputs.push_back(csv);
    manifest.write();

    std::cout << "best energy " << fmt_term(best_energy);
    if (n_points >= dim + 1) {
        const double gap = conjectured_value(dim, n_points) - best_energy;
        std::cout << " gap to conjectured " << fmt_term(gap);
    }
    std::cout << " (" << output << ")\n";
    return 0;
}

int cmd_scan_alpha(int dim, int n_points, double lo, double hi, double tol, AscentOptions opts,
                   const std::string& output) {
    Manifest manifest;
    manifest.command = "scan-alpha";
    manifest.started = now_iso8601();
    manifest.seed = opts.seed;
    manifest.parameters = {{"dim", std::to_string(dim)},       {"n-points", std::to_string(n_points)},
                           {"alpha-lo", fmt_file(lo)},         {"alpha-hi", fmt_file(hi)},
                           {"alpha-tol", fmt_file(tol)},       {"restarts", std::to_string(opts.restarts)},
                           {"seed", std::to_string(opts.seed)}};

    const ThresholdEstimate est = estimate_threshold(dim, n_points, lo, hi, tol, opts);

    std::ofstream cs(output);
    cs << "alpha,best_energy,conjectured,gap,verdict\n";
    for (const auto& s : est.samples) {
        const char* verdict = s.verdict == ThresholdVerdict::Above
                                  ? "above"
                                  : (s.verdict == ThresholdVerdict::Below ? "below" : "tie");
        cs << fmt_file(s.alpha) << "," << fmt_file(s.best_energy) << "," << fmt_file(s.conjectured)
           << "," << fmt_file(s.best_energy - s.conjectured) << "," << verdict << "\n";
    }
    cs << "# bracket," << fmt_file(est.alpha_lo) << "," << fmt_file(est.alpha_hi)
       << (est.trivial ? ",trivial" : "") << (est.widened ? ",widened" : "") << "\n";
    manifest.outputs.push_back(output);
    manifest.write();

    std::cout << "threshold bracket [" << fmt_term(est.alpha_lo) << ", " << fmt_term(est.alpha_hi)
              << "] after " << est.samples.size() << " probes"
              << (est.trivial ? " (trivial: N <= d+1)" : "") << "\n";
    return 0;
}

int cmd_transport(const std::string& file_a, const std::string& file_b, const std::string& p_name,
                  const std::string& metric_name, const std::string& output) {
    const TransportMetric metric = parse_metric(metric_name);
    const DiscreteMeasure a = load_measure(file_a);
    const DiscreteMeasure b = load_measure(file_b);

    double value;
    TransportPlan plan;
    if (p_name == "inf") {
        std::tie(value, plan) = dinf_distance(a, b, metric);
    } else if (p_name == "1" || p_name == "2") {
        std::tie(value, plan) = dp_distance(a, b, p_name == "1" ? 1 : 2, metric);
    } else {
        throw CLI::ValidationError("--p", "must be 1, 2, or inf");
    }
    std::cout << "d_" << p_name << " = " << fmt_term(value) << "\n";

    if (!output.empty()) {
        Manifest manifest;
        manifest.command = "transport";
        manifest.started = now_iso8601();
        manifest.parameters = {{"file-a", file_a}, {"file-b", file_b}, {"p", p_name},
                               {"metric", metric_name}};
        std::ofstream cs(output);
        cs << "i,j,mass\n";
        for (int i = 0; i < plan.rows; ++i)
            for (int j = 0; j < plan.cols; ++j)
                if (plan.mass(i, j) > 0.0)
                    cs << i << "," << j << "," << fmt_file(plan.mass(i, j)) << "\n";
        manifest.outputs.push_back(output);
        manifest.write();
    }
    return 0;
}

struct VerifyParams {
    int dim = 2;
    double alpha = 2.0;
    double radius = 0.05;
    int trials = 1000;
    int k_split = 5;
    int grid_size = 100000;
    double c_target = 0.5;
    int samples = 100000;
    std::uint64_t seed = 0;
    std::string weights = "equal";
    std::string output;
};

DiscreteMeasure stability_target(int dim, const std::string& weights) {
    if (weights == "equal") return equidistributed_basis(dim);
    // "unequal": 0.6 on the first vertex, the rest split evenly
    Vector w = Vector::Constant(dim + 1, 0.4 / dim);
    w[0] = 0.6;
    return DiscreteMeasure(Matrix::Identity(dim + 1, dim + 1), w);
}

int cmd_verify(const std::string& suite, const VerifyParams& p) {
    std::vector<std::string> csv_rows;
    std::string csv_header;
    bool pass = true;

    if (suite == "majorization") {
        csv_header = "alpha,min_gap,argmin_t,n_equality_points,pass";
        const MajorizationReport rep = majorization_check(p.alpha, p.grid_size);
        pass = rep.pass;
        std::ostringstream row;
        row << fmt_file(p.alpha) << "," << fmt_file(rep.min_gap) << "," << fmt_file(rep.argmin_t)
            << "," << rep.equality_points.size() << "," << (rep.pass ? 1 : 0);
        csv_rows.push_back(row.str());
        std::cout << "majorization alpha=" << fmt_term(p.alpha) << " min_gap=" << fmt_term(rep.min_gap)
                  << " argmin_t=" << fmt_term(rep.argmin_t) << " -> " << (pass ? "PASS" : "FAIL")
                  << "\n";
    } else if (suite == "chain") {
        csv_header = "case,dim,alpha,e_f,e_g,e_g_sigma,pass";
        for (int k = 0; k < p.trials; ++k) {
            const DiscreteMeasure mu =
                random_configuration(p.dim, 3 + k % 6, p.seed + 17 * k + 1, k % 2 == 0);
            const ChainReport rep = chain_check(mu, p.alpha);
            pass = pass && rep.pass;
            std::ostringstream row;
            row << k << "," << p.dim << "," << fmt_file(p.alpha) << "," << fmt_file(rep.e_f) << ","
                << fmt_file(rep.e_g) << "," << fmt_file(rep.e_g_sigma) << "," << (rep.pass ? 1 : 0);
            csv_rows.push_back(row.str());
        }
        std::cout << "chain dim=" << p.dim << " alpha=" << fmt_term(p.alpha) << " trials=" << p.trials
                  << " -> " << (pass ? "PASS" : "FAIL") << "\n";
    } else if (suite == "stability") {
        csv_header = "dim,alpha,weights,radius,trials,violations,max_energy_gain,pass";
        const StabilityReport rep = stability_experiment(stability_target(p.dim, p.weights), p.alpha,
                                                         p.radius, p.k_split, p.trials, p.seed);
        pass = rep.violations == 0;
        std::ostringstream row;
        row << p.dim << "," << fmt_file(p.alpha) << "," << p.weights << "," << fmt_file(p.radius)
            << "," << rep.trials << "," << rep.violations << "," << fmt_file(rep.max_energy_gain)
            << "," << (pass ? 1 : 0);
        csv_rows.push_back(row.str());
        std::cout << "stability dim=" << p.dim << " alpha=" << fmt_term(p.alpha) << " r="
                  << fmt_term(p.radius) << " violations=" << rep.violations << "/" << rep.trials
                  << " -> " << (pass ? "PASS" : "FAIL") << "\n";
    } else if (suite == "aggregation") {
        csv_header = "dim,radius,c_target,c_empirical,pass";
        // nu_i: random 5-atom measures inside the caps D(e_i, r)
        Rng rng(p.seed);
        std::vector<DiscreteMeasure> nus;
        for (int i = 1; i <= p.dim; ++i) {
            const Vector center = SpherePoint::basis(p.dim, i).coords();
            Matrix pts(p.dim + 1, 5);
            for (int k = 0; k < 5; ++k) {
                Vector g = rng.gaussian_vector(p.dim + 1);
                g -= g.dot(center) * center;
                if (g.norm() < 1e-12) g = Vector::Unit(p.dim + 1, (i + 1) % (p.dim + 1));
                g.normalize();
                const double len = 0.8 * p.radius * rng.uniform();
                pts.col(k) = center * std::cos(len) + g * std::sin(len);
            }
            nus.emplace_back(DiscreteMeasure::uniform(pts));
        }
        const AggregationReport rep =
            aggregation_constant(nus, p.radius, p.c_target, p.samples, p.seed + 1);
        pass = rep.pass;
        std::ostringstream row;
        row << p.dim << "," << fmt_file(p.radius) << "," << fmt_file(p.c_target) << ","
            << fmt_file(rep.c_empirical) << "," << (pass ? 1 : 0);
        csv_rows.push_back(row.str());
        std::cout << "aggregation dim=" << p.dim << " r=" << fmt_term(p.radius)
                  << " c_empirical=" << fmt_term(rep.c_empirical) << " target=" << fmt_term(p.c_target)
                  << " -> " << (pass ? "PASS" : "FAIL") << "\n";
    } else if (suite == "frame") {
        csv_header = "check,value,reference,tolerance,pass";
        // Monte Carlo moment concentration for the uniform measure
        const DiscreteMeasure mc = random_configuration(p.dim, p.samples, p.seed);
        const MomentMatrix I = moment_matrix(mc);
        const double tr2 = (I.entries * I.entries).trace();
        // delta-method standard error of Tr(I^2) from the sampled quadratic forms
        double mean_q = 0.0, var_q = 0.0;
        for (int k = 0; k < mc.size(); ++k) {
            const double q = 2.0 * mc.points().col(k).dot(I.entries * mc.points().col(k));
            mean_q += q;
        }
        mean_q /= mc.size();
        for (int k = 0; k < mc.size(); ++k) {
            const double q = 2.0 * mc.points().col(k).dot(I.entries * mc.points().col(k));
            var_q += (q - mean_q) * (q - mean_q);
        }
        const double se = std::sqrt(var_q) / mc.size();
        const double target = 1.0 / (p.dim + 1);
        const bool mc_ok = std::abs(tr2 - target) <= 3.0 * se + 1e-9;
        pass = pass && mc_ok;
        {
            std::ostringstream row;
            row << "mc_trace," << fmt_file(tr2) << "," << fmt_file(target) << "," << fmt_file(3 * se)
                << "," << (mc_ok ? 1 : 0);
            csv_rows.push_back(row.str());
        }
        // identity and bound on random measures
        for (int k = 0; k < p.trials; ++k) {
            const DiscreteMeasure mu =
                random_configuration(p.dim, 3 + k % 7, p.seed + 31 * k + 7, k % 2 == 1);
            const FrameBoundReport rep = frame_bound_check(mu);
            const bool ok =
                rep.energy_identity_gap <= 1e-12 && rep.tr_I2 >= rep.lower_bound - 1e-12;
            pass = pass && ok;
            std::ostringstream row;
            row << "random_measure_" << k << "," << fmt_file(rep.tr_I2) << ","
                << fmt_file(rep.lower_bound) << "," << fmt_file(rep.energy_identity_gap) << ","
                << (ok ? 1 : 0);
            csv_rows.push_back(row.str());
        }
        std::cout << "frame dim=" << p.dim << " tr_I2=" << fmt_term(tr2) << " target="
                  << fmt_term(target) << " se=" << fmt_term(se) << " trials=" << p.trials << " -> "
                  << (pass ? "PASS" : "FAIL") << "\n";
    } else {
        throw CLI::ValidationError("suite", "unknown suite: " + suite);
    }

    if (!p.output.empty()) {
        Manifest manifest;
        manifest.command = "verify " + suite;
        manifest.started = now_iso8601();
        manifest.seed = p.seed;
        manifest.parameters = {{"suite", suite},
                               {"dim", std::to_string(p.dim)},
                               {"alpha", fmt_file(p.alpha)},
                               {"trials", std::to_string(p.trials)},
                               {"seed", std::to_string(p.seed)}};
        std::ofstream cs(p.output);
        cs << csv_header << "\n";
        for (const auto& row : csv_rows) cs << row << "\n";
        manifest.outputs.push_back(p.output);
        manifest.write();
    }
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"projective-angle energy toolkit"};
    app.require_subcommand(1);

    // energy
    std::string measure_file;
    double alpha = 2.0;
    std::string convention = "half";
    std::string params_file;
    auto* energy_cmd = app.add_subcommand("energy", "energy of a measure file");
    energy_cmd->add_option("measure", measure_file, "measure JSON file")->required();
    energy_cmd->add_option("--alpha", alpha, "kernel exponent (inf allowed)");
    energy_cmd->add_option("--convention", convention, "half|plain");
    energy_cmd->add_option("--params", params_file, "JSON parameter file overriding flags");

    // optimize
    int dim = 2, n_points = 3;
    AscentOptions opts;
    std::string output;
    auto* opt_cmd = app.add_subcommand("optimize", "maximize E_alpha over N particles");
    opt_cmd->add_option("--dim", dim, "sphere dimension d")->required();
    opt_cmd->add_option("--n-points", n_points, "number of particles")->required();
    opt_cmd->add_option("--alpha", alpha, "kernel exponent")->required();
    opt_cmd->add_option("--restarts", opts.restarts, "random restarts");
    opt_cmd->add_option("--max-iters", opts.max_iters, "iteration cap per restart");
    opt_cmd->add_option("--seed", opts.seed, "master seed");
    opt_cmd->add_option("--threads", opts.threads, "worker cap (result-invariant)");
    opt_cmd->add_option("--output", output, "best measure JSON path")->required();
    opt_cmd->add_option("--params", params_file, "JSON parameter file overriding flags");

    // scan-alpha
    double alpha_lo = 1.0, alpha_hi = 3.0, alpha_tol = 0.1;
    auto* scan_cmd = app.add_subcommand("scan-alpha", "bisect the threshold exponent");
    scan_cmd->add_option("--dim", dim, "sphere dimension d")->required();
    scan_cmd->add_option("--n-points", n_points, "number of particles")->required();
    scan_cmd->add_option("--alpha-lo", alpha_lo, "bracket lower end")->required();
    scan_cmd->add_option("--alpha-hi", alpha_hi, "bracket upper end")->required();
    scan_cmd->add_option("--alpha-tol", alpha_tol, "bracket width target");
    scan_cmd->add_option("--restarts", opts.restarts, "random restarts per probe");
    scan_cmd->add_option("--max-iters", opts.max_iters, "iteration cap per restart");
    scan_cmd->add_option("--seed", opts.seed, "master seed");
    scan_cmd->add_option("--threads", opts.threads, "worker cap (result-invariant)");
    scan_cmd->add_option("--output", output, "samples CSV path")->required();
    scan_cmd->add_option("--params", params_file, "JSON parameter file overriding flags");

    // transport
    std::string file_a, file_b, p_name = "1", metric = "sphere";
    auto* tr_cmd = app.add_subcommand("transport", "optimal transport distance between measures");
    tr_cmd->add_option("file-a", file_a, "first measure file")->required();
    tr_cmd->add_option("file-b", file_b, "second measure file")->required();
    tr_cmd->add_option("--p", p_name, "1|2|inf");
    tr_cmd->add_option("--metric", metric, "sphere|projective");
    tr_cmd->add_option("--output", output, "optional plan CSV path");
    tr_cmd->add_option("--params", params_file, "JSON parameter file overriding flags");

    // verify
    std::string suite;
    VerifyParams vp;
    auto* ver_cmd = app.add_subcommand("verify", "run a verification suite");
    ver_cmd->add_option("suite", suite, "majorization|chain|stability|aggregation|frame")->required();
    ver_cmd->add_option("--dim", vp.dim, "sphere dimension d");
    ver_cmd->add_option("--alpha", vp.alpha, "kernel exponent");
    ver_cmd->add_option("--radius", vp.radius, "perturbation / cap radius");
    ver_cmd->add_option("--trials", vp.trials, "number of randomized cases");
    ver_cmd->add_option("--k-split", vp.k_split, "fragments per atom (stability)");
    ver_cmd->add_option("--grid-size", vp.grid_size, "grid size (majorization)");
    ver_cmd->add_option("--c-target", vp.c_target, "aggregation constant target");
    ver_cmd->add_option("--samples", vp.samples, "sample count (frame / aggregation)");
    ver_cmd->add_option("--seed", vp.seed, "master seed");
    ver_cmd->add_option("--weights", vp.weights, "equal|unequal (stability target)");
    ver_cmd->add_option("--output", vp.output, "per-case CSV path");
    ver_cmd->add_option("--params", params_file, "JSON parameter file overriding flags");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*energy_cmd) {
            apply_overrides(params_file, {{"alpha", &alpha}}, {{"convention", &convention}});
            return cmd_energy(measure_file, alpha, convention);
        }
        if (*opt_cmd) {
            double restarts_d = opts.restarts, seed_d = static_cast<double>(opts.seed);
            apply_overrides(params_file, {{"alpha", &alpha}, {"restarts", &restarts_d}, {"seed", &seed_d}},
                            {{"output", &output}});
            opts.restarts = static_cast<int>(restarts_d);
            opts.seed = static_cast<std::uint64_t>(seed_d);
            return cmd_optimize(dim, n_points, alpha, opts, output);
        }
        if (*scan_cmd) {
            apply_overrides(params_file,
                            {{"alpha-lo", &alpha_lo}, {"alpha-hi", &alpha_hi}, {"alpha-tol", &alpha_tol}},
                            {{"output", &output}});
            return cmd_scan_alpha(dim, n_points, alpha_lo, alpha_hi, alpha_tol, opts, output);
        }
        if (*tr_cmd) {
            apply_overrides(params_file, {}, {{"p", &p_name}, {"metric", &metric}, {"output", &output}});
            return cmd_transport(file_a, file_b, p_name, metric, output);
        }
        if (*ver_cmd) {
            apply_overrides(params_file,
                            {{"alpha", &vp.alpha}, {"radius", &vp.radius}, {"c-target", &vp.c_target}},
                            {{"weights", &vp.weights}, {"output", &vp.output}});
            return cmd_verify(suite, vp);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ThresholdInconsistency& e) {
        std::cerr << "inconsistent verdicts: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
