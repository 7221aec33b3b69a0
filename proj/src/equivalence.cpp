#include "projang/equivalence.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace projang {

namespace {

Matrix projective_distances(const DiscreteMeasure& m) {
    Matrix d(m.size(), m.size());
    for (int i = 0; i < m.size(); ++i) {
        d(i, i) = 0.0;
        for (int j = i + 1; j < m.size(); ++j) {
            const double dot = std::abs(m.points().col(i).dot(m.points().col(j)));
            d(i, j) = d(j, i) = std::acos(detail::clamp_unit(dot));
        }
    }
    return d;
}

// Procrustes alignment for fixed signs: the orthogonal R maximizing
// sum_i w_i s_i <R a_i, b_i> is V U^T for the SVD of the weighted
// cross-covariance sum_i w_i s_i a_i b_i^T.
Matrix procrustes(const Matrix& a, const Matrix& b, const Vector& w, const std::vector<int>& sign) {
    Matrix cov = Matrix::Zero(a.rows(), a.rows());
    for (int i = 0; i < a.cols(); ++i) cov += (w[i] * sign[i]) * a.col(i) * b.col(i).transpose();
    Eigen::JacobiSVD<Matrix> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixV() * svd.matrixU().transpose();
}

double alignment_residual(const Matrix& rot, const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (int i = 0; i < a.cols(); ++i) {
        const double dot = std::abs((rot * a.col(i)).dot(b.col(i)));
        worst = std::max(worst, std::acos(detail::clamp_unit(dot)));
    }
    return worst;
}

// Best orthogonal alignment of matched atom lists under per-atom sign freedom.
// Enumerates sign patterns up to k = 16 atoms; beyond that alternates sign
// assignment and Procrustes refits.
std::pair<Matrix, double> align_with_signs(const Matrix& a, const Matrix& b, const Vector& w) {
    const int k = static_cast<int>(a.cols());
    std::vector<int> sign(k, 1);
    Matrix best_rot;
    double best_res = std::numeric_limits<double>::infinity();

    if (k <= 16) {
        // Global sign is absorbed by R, so the first sign can stay fixed.
        const std::uint32_t patterns = 1u << (k - 1);
        for (std::uint32_t bits = 0; bits < patterns; ++bits) {
            for (int i = 1; i < k; ++i) sign[i] = (bits >> (i - 1)) & 1u ? -1 : 1;
            const Matrix rot = procrustes(a, b, w, sign);
            const double res = alignment_residual(rot, a, b);
            if (res < best_res) {
                best_res = res;
                best_rot = rot;
            }
        }
        return {best_rot, best_res};
    }

    for (int round = 0; round < 64; ++round) {
        const Matrix rot = procrustes(a, b, w, sign);
        const double res = alignment_residual(rot, a, b);
        if (res < best_res) {
            best_res = res;
            best_rot = rot;
        }
        bool changed = false;
        for (int i = 0; i < k; ++i) {
            const int s = (rot * a.col(i)).dot(b.col(i)) >= 0.0 ? 1 : -1;
            if (s != sign[i]) {
                sign[i] = s;
                changed = true;
            }
        }
        if (!changed) break;
    }
    return {best_rot, best_res};
}

struct MatchSearch {
    const DiscreteMeasure& a;
    const DiscreteMeasure& b;
    const Matrix& da;
    const Matrix& db;
    double tol;
    std::vector<int> match;   // match[i] = index in b for atom i of a
    std::vector<char> used;
    EquivalenceWitness result;

    bool extend(int i) {
        const int n = a.size();
        if (i == n) return finish();
        for (int j = 0; j < n; ++j) {
            if (used[j]) continue;
            if (std::abs(a.weight(i) - b.weight(j)) > tol) continue;
            bool consistent = true;
            for (int prev = 0; prev < i; ++prev)
                if (std::abs(da(i, prev) - db(j, match[prev])) > tol) {
                    consistent = false;
                    break;
                }
            if (!consistent) continue;
            match[i] = j;
            used[j] = 1;
            if (extend(i + 1)) return true;
            used[j] = 0;
        }
        return false;
    }

    bool finish() {
        Matrix bp(b.points().rows(), b.size());
        for (int i = 0; i < a.size(); ++i) bp.col(i) = b.points().col(match[i]);
        auto [rot, res] = align_with_signs(a.points(), bp, a.weights());
        if (res <= tol) {
            result.equivalent = true;
            result.rotation = rot;
            result.residual = res;
            std::vector<std::pair<int, int>> pairs;
            for (int i = 0; i < a.size(); ++i) pairs.emplace_back(i, match[i]);
            result.atom_matching = std::move(pairs);
            return true;
        }
        return false;
    }
};

}  // namespace

EquivalenceWitness essentially_equivalent(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                          double tol) {
    if (mu.dim() != nu.dim()) throw std::invalid_argument("essentially_equivalent: dimension mismatch");
    const DiscreteMeasure a = project_to_rp(mu, tol);
    const DiscreteMeasure b = project_to_rp(nu, tol);
    if (a.size() > 64 || b.size() > 64)
        throw std::invalid_argument("essentially_equivalent: more than 64 atoms after projection");

    EquivalenceWitness witness;
    if (a.size() != b.size()) return witness;

    // Bitwise-identical projections short-circuit with the exact identity
    // witness; the acos-based residual cannot reach 0 otherwise.
    if ((a.points() - b.points()).cwiseAbs().maxCoeff() == 0.0 &&
        (a.weights() - b.weights()).cwiseAbs().maxCoeff() == 0.0) {
        witness.equivalent = true;
        witness.rotation = Matrix::Identity(a.points().rows(), a.points().rows());
        witness.residual = 0.0;
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < a.size(); ++i) pairs.emplace_back(i, i);
        witness.atom_matching = std::move(pairs);
        return witness;
    }

    const Matrix da = projective_distances(a);
    const Matrix db = projective_distances(b);
    MatchSearch search{a, b, da, db, tol, std::vector<int>(a.size(), -1),
                       std::vector<char>(b.size(), 0), witness};
    if (search.extend(0)) return search.result;
    return witness;
}

bool is_in_PDelta(const DiscreteMeasure& mu, double tol) {
    const DiscreteMeasure m = project_to_rp(mu, tol);
    if (m.size() != m.dim() + 1) return false;
    for (int i = 0; i < m.size(); ++i) {
        if (!(m.weight(i) > 0.0)) return false;
        for (int j = i + 1; j < m.size(); ++j)
            if (std::abs(m.points().col(i).dot(m.points().col(j))) > tol) return false;
    }
    return true;
}

}  // namespace projang
