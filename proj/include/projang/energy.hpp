#pragma once

#include "projang/measures.hpp"

#include <cstdint>
#include <vector>

namespace projang {

// Half is the main-text normalization E_alpha = (1/2) B_alpha; Plain is the
// double-integral form E_f used for the majorization chain. Plain = 2 * Half.
enum class Convention { Half, Plain };

struct EnergyReport {
    double value = 0.0;
    Convention convention = Convention::Half;
    KernelSpec kernel;
};

// B(mu, nu) = sum_ij w_i v_j K(x_i, y_j), Kahan-compensated.
double bilinear_form(const KernelSpec& spec, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

EnergyReport energy(const KernelSpec& spec, const DiscreteMeasure& mu,
                    Convention convention = Convention::Half);

double energy_value(const KernelSpec& spec, const DiscreteMeasure& mu,
                    Convention convention = Convention::Half);

// Conjectured optimal energy d/(2d+2) (N = infinity limit) and its discrete
// analogue attained by fejes_toth_config(d, N). Throws for N < d+1.
double conjectured_value(int d, int N, Convention convention = Convention::Half);
double conjectured_value_infinite(int d, Convention convention = Convention::Half);

// Potential (K * mu)(x) = sum_j w_j K(x, x_j).
double potential(const KernelSpec& spec, const DiscreteMeasure& mu, const SpherePoint& x);

// First-order optimality certificate: max(0, M_probe - m_supp) where m_supp is
// the minimum potential over support atoms and M_probe the maximum over
// support plus `probe_count` random points. Near zero iff the support sits in
// the argmax of its own potential.
double euler_lagrange_residual(const KernelSpec& spec, const DiscreteMeasure& mu,
                               int probe_count, std::uint64_t seed);

// E_alpha of the uniform measure on S^d by composite Simpson quadrature,
// split at the kernel kink theta = pi/2.
double uniform_energy(int d, double alpha, Convention convention = Convention::Half);

// max_{s in [0,1]} |s^alpha - s^beta|; bounds |E_alpha - E_beta| (Plain).
double kernel_sup_diff(double alpha, double beta);

// Gradient of the Half-convention energy in the atom positions at fixed
// weights: entry i is sum_{j != i} w_i w_j grad_kernel(x_i, x_j).
std::vector<TangentVector> energy_gradient(const KernelSpec& spec, const DiscreteMeasure& mu);

namespace detail {

// Kahan-compensated accumulator; deterministic for a fixed visit order.
class KahanSum {
public:
    void add(double value) {
        const double y = value - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

}  // namespace detail

}  // namespace projang
