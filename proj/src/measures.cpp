#include "projang/measures.hpp"

#include "projang/rng.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace projang {

DiscreteMeasure::DiscreteMeasure(Matrix points, Vector weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.rows() < 2) throw std::invalid_argument("DiscreteMeasure: need d >= 1");
    if (points_.cols() != weights_.size() || points_.cols() == 0)
        throw std::invalid_argument("DiscreteMeasure: points/weights size mismatch");
    for (int j = 0; j < points_.cols(); ++j) {
        const double norm = points_.col(j).norm();
        if (std::abs(norm - 1.0) > kUnitNormTol)
            throw std::invalid_argument("DiscreteMeasure: atom is not unit norm");
        points_.col(j) /= norm;
        if (weights_[j] < 0.0) throw std::invalid_argument("DiscreteMeasure: negative weight");
    }
    const double total = weights_.sum();
    if (total <= 0.0) throw std::invalid_argument("DiscreteMeasure: zero total mass");
    weights_ /= total;

    // Drop numerically empty atoms, renormalizing the survivors.
    std::vector<int> keep;
    for (int j = 0; j < weights_.size(); ++j)
        if (weights_[j] >= 1e-15) keep.push_back(j);
    if (keep.size() != static_cast<size_t>(weights_.size())) {
        Matrix p(points_.rows(), keep.size());
        Vector w(keep.size());
        for (size_t k = 0; k < keep.size(); ++k) {
            p.col(k) = points_.col(keep[k]);
            w[k] = weights_[keep[k]];
        }
        points_ = std::move(p);
        weights_ = w / w.sum();
    }
}

DiscreteMeasure DiscreteMeasure::uniform(Matrix points) {
    const int n = static_cast<int>(points.cols());
    return DiscreteMeasure(std::move(points), Vector::Constant(n, 1.0 / n));
}

DiscreteMeasure DiscreteMeasure::dirac(const SpherePoint& x) {
    Matrix p(x.ambient_dim(), 1);
    p.col(0) = x.coords();
    return DiscreteMeasure(std::move(p), Vector::Ones(1));
}

DiscreteMeasure DiscreteMeasure::trusted(Matrix points, Vector weights) {
    return DiscreteMeasure(std::move(points), std::move(weights), trusted_tag{});
}

SpherePoint DiscreteMeasure::atom(int i) const { return SpherePoint(points_.col(i)); }

DiscreteMeasure DiscreteMeasure::rotated(const Matrix& orthogonal) const {
    if (orthogonal.rows() != points_.rows() || orthogonal.cols() != points_.rows())
        throw std::invalid_argument("rotated: matrix shape mismatch");
    return DiscreteMeasure(orthogonal * points_, weights_);
}

DiscreteMeasure equidistributed_basis(int d) {
    if (d < 1) throw std::invalid_argument("equidistributed_basis: d >= 1 required");
    return DiscreteMeasure::uniform(Matrix::Identity(d + 1, d + 1));
}

DiscreteMeasure fejes_toth_config(int d, int N) {
    if (d < 1 || N < 1) throw std::invalid_argument("fejes_toth_config: d, N >= 1 required");
    const int q = N / (d + 1);
    const int r = N % (d + 1);
    // First r basis classes get q+1 points, the rest q; coincident points at a
    // basis vector collapse to one atom of mass (class size)/N.
    std::vector<std::pair<int, int>> classes; // (basis index, count)
    for (int j = 0; j <= d; ++j) {
        const int n_j = q + (j < r ? 1 : 0);
        if (n_j > 0) classes.emplace_back(j, n_j);
    }
    Matrix p(d + 1, classes.size());
    Vector w(classes.size());
    for (size_t k = 0; k < classes.size(); ++k) {
        p.col(k) = Vector::Zero(d + 1);
        p(classes[k].first, k) = 1.0;
        w[k] = static_cast<double>(classes[k].second) / N;
    }
    return DiscreteMeasure(std::move(p), std::move(w));
}

DiscreteMeasure random_configuration(int d, int N, std::uint64_t seed, bool weighted) {
    if (d < 1 || N < 1) throw std::invalid_argument("random_configuration: d, N >= 1 required");
    Rng rng(seed);
    Matrix p(d + 1, N);
    for (int j = 0; j < N; ++j) p.col(j) = rng.sphere_vector(d + 1);
    Vector w = weighted ? rng.simplex_vector(N) : Vector::Constant(N, 1.0 / N);
    return DiscreteMeasure(std::move(p), std::move(w));
}

namespace {

// Flip sign so the largest-magnitude coordinate (lowest index on ties) is positive.
void canonicalize_sign(Eigen::Ref<Vector> x) {
    int best = 0;
    for (int i = 1; i < x.size(); ++i)
        if (std::abs(x[i]) > std::abs(x[best])) best = i;
    if (x[best] < 0.0) x = -x;
}

}  // namespace

DiscreteMeasure project_to_rp(const DiscreteMeasure& mu, double merge_tol) {
    Matrix p = mu.points();
    for (int j = 0; j < p.cols(); ++j) canonicalize_sign(p.col(j));

    // Greedy merge in input order; representatives keep their point.
    std::vector<int> rep;
    Vector w = Vector::Zero(p.cols());
    for (int j = 0; j < p.cols(); ++j) {
        bool merged = false;
        for (size_t k = 0; k < rep.size(); ++k) {
            const double dot = std::abs(p.col(rep[k]).dot(p.col(j)));
            if (std::acos(detail::clamp_unit(dot)) <= merge_tol) {
                w[k] += mu.weight(j);
                merged = true;
                break;
            }
        }
        if (!merged) {
            w[rep.size()] = mu.weight(j);
            rep.push_back(j);
        }
    }
    Matrix out(p.rows(), rep.size());
    for (size_t k = 0; k < rep.size(); ++k) out.col(k) = p.col(rep[k]);
    // Sign flips preserve norms bitwise and merges only re-add the weights, so
    // the result is passed through untouched; this keeps projection idempotent
    // to the bit.
    return DiscreteMeasure::trusted(std::move(out), w.head(rep.size()));
}

MeasureClass classify(const DiscreteMeasure& mu, double tol) {
    const DiscreteMeasure m = project_to_rp(mu);
    const int d = m.dim();
    const int n = m.size();

    bool orthonormal = (n == d + 1);
    if (orthonormal) {
        for (int i = 0; i < n && orthonormal; ++i)
            for (int j = i + 1; j < n; ++j)
                if (std::abs(m.points().col(i).dot(m.points().col(j))) > tol) {
                    orthonormal = false;
                    break;
                }
    }
    const double uniform_w = 1.0 / n;
    bool equal_weights = true;
    for (int i = 0; i < n; ++i)
        if (std::abs(m.weight(i) - uniform_w) > tol) {
            equal_weights = false;
            break;
        }

    if (orthonormal && equal_weights) return MeasureClass::PDeltaEq;
    if (orthonormal) return MeasureClass::PDelta;
    if (equal_weights) return MeasureClass::PNEq;
    return MeasureClass::Other;
}

std::string to_string(MeasureClass c) {
    switch (c) {
        case MeasureClass::PNEq: return "PNEq";
        case MeasureClass::POn: return "POn";
        case MeasureClass::POnEq: return "POnEq";
        case MeasureClass::PDelta: return "PDelta";
        case MeasureClass::PDeltaEq: return "PDeltaEq";
        case MeasureClass::PNDeltaEq: return "PNDeltaEq";
        case MeasureClass::Other: return "Other";
    }
    return "Other";
}

DiscreteMeasure measure_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("dim") || !j.contains("points") || !j.contains("weights"))
        throw std::invalid_argument("measure: missing dim/points/weights");
    const int d = j["dim"].get<int>();
    if (d < 1) throw std::invalid_argument("measure: dim must be >= 1");
    const auto& pts = j["points"];
    const auto& wts = j["weights"];
    if (!pts.is_array() || !wts.is_array() || pts.size() != wts.size() || pts.empty())
        throw std::invalid_argument("measure: points/weights must be equal-length nonempty arrays");

    const int n = static_cast<int>(pts.size());
    Matrix p(d + 1, n);
    Vector w(n);
    double wsum = 0.0;
    for (int k = 0; k < n; ++k) {
        const auto& row = pts[k];
        if (!row.is_array() || static_cast<int>(row.size()) != d + 1)
            throw std::invalid_argument("measure: each point needs d+1 coordinates");
        for (int i = 0; i <= d; ++i) p(i, k) = row[i].get<double>();
        const double norm = p.col(k).norm();
        if (std::abs(norm - 1.0) > 1e-6)
            throw std::invalid_argument("measure: point is not unit norm (beyond 1e-6)");
        p.col(k) /= norm;
        w[k] = wts[k].get<double>();
        if (w[k] < 0.0) throw std::invalid_argument("measure: negative weight");
        wsum += w[k];
    }
    if (std::abs(wsum - 1.0) > 1e-6)
        throw std::invalid_argument("measure: weights do not sum to 1 (beyond 1e-6)");
    return DiscreteMeasure(std::move(p), std::move(w));
}

std::string measure_to_json(const DiscreteMeasure& mu) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"dim\": " << mu.dim() << ",\n\"points\": [\n";
    for (int k = 0; k < mu.size(); ++k) {
        os << "  [";
        for (int i = 0; i <= mu.dim(); ++i) os << (i ? ", " : "") << mu.points()(i, k);
        os << "]" << (k + 1 < mu.size() ? "," : "") << "\n";
    }
    os << "],\n\"weights\": [";
    for (int k = 0; k < mu.size(); ++k) os << (k ? ", " : "") << mu.weight(k);
    os << "]}\n";
    return os.str();
}

DiscreteMeasure load_measure(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open measure file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return measure_from_json(buf.str());
}

void save_measure(const DiscreteMeasure& mu, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write measure file: " + path);
    out << measure_to_json(mu);
}

}  // namespace projang
