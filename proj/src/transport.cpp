#include "projang/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <vector>

namespace projang {

namespace {

constexpr double kMassGrid = 1e-12;    // weight resolution for the flow solvers
constexpr std::int64_t kGridTotal = 1000000000000LL; // 1 / kMassGrid

// Double-double accumulator. The assignment solver and its brute-force oracle
// both rank permutations with it, so near-ulp cost ties resolve identically on
// both routes instead of depending on rounding order.
struct DD {
    double hi = 0.0;
    double lo = 0.0;

    static DD two_sum(double a, double b) {
        const double s = a + b;
        const double v = s - a;
        return {s, (a - (s - v)) + (b - v)};
    }
    static DD from(double x) { return {x, 0.0}; }

    DD operator+(const DD& o) const {
        const DD s = two_sum(hi, o.hi);
        const DD r = two_sum(s.hi, s.lo + lo + o.lo);
        return r;
    }
    DD operator-() const { return {-hi, -lo}; }
    DD operator-(const DD& o) const { return *this + (-o); }
    bool operator<(const DD& o) const {
        const DD d = *this - o;
        return d.hi < 0.0 || (d.hi == 0.0 && d.lo < 0.0);
    }
};

double point_distance(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b,
                      TransportMetric metric) {
    if (a == b) return 0.0; // exact zero on identical atoms
    const double dot = a.dot(b);
    if (metric == TransportMetric::Projective)
        return std::acos(detail::clamp_unit(std::abs(dot)));
    return std::acos(detail::clamp_unit(dot));
}

// Round weights to the common integer grid, largest-remainder apportionment so
// the total is exact and each entry is off by less than one grid unit.
std::vector<std::int64_t> weights_to_grid(const Vector& w) {
    const int n = static_cast<int>(w.size());
    std::vector<std::int64_t> units(n);
    std::vector<std::pair<double, int>> remainder(n);
    std::int64_t assigned = 0;
    for (int i = 0; i < n; ++i) {
        const double scaled = w[i] * static_cast<double>(kGridTotal);
        units[i] = static_cast<std::int64_t>(std::floor(scaled));
        remainder[i] = {scaled - static_cast<double>(units[i]), i};
        assigned += units[i];
    }
    std::sort(remainder.begin(), remainder.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::int64_t deficit = kGridTotal - assigned;
    for (int k = 0; deficit > 0; k = (k + 1) % n, --deficit) ++units[remainder[k].second];
    for (int k = 0; deficit < 0; k = (k + 1) % n, ++deficit) {
        while (units[remainder[k].second] == 0) k = (k + 1) % n;
        --units[remainder[k].second];
    }
    return units;
}

bool is_uniform(const DiscreteMeasure& mu) {
    const double u = 1.0 / mu.size();
    for (int i = 0; i < mu.size(); ++i)
        if (std::abs(mu.weight(i) - u) > 1e-12) return false;
    return true;
}

// Successive shortest paths with potentials on the dense bipartite
// transportation problem. Supplies/demands are exact integers; costs are
// nonnegative doubles. Returns the flow matrix in grid units.
Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> min_cost_transport(
    std::vector<std::int64_t> supply, std::vector<std::int64_t> demand, const Matrix& cost) {
    const int m = static_cast<int>(supply.size());
    const int n = static_cast<int>(demand.size());
    const int V = m + n; // sources 0..m-1, sinks m..m+n-1
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> flow =
        Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(m, n);
    std::vector<double> pot(V, 0.0);
    const double inf = std::numeric_limits<double>::infinity();

    std::int64_t remaining = std::accumulate(supply.begin(), supply.end(), std::int64_t{0});
    while (remaining > 0) {
        // Dense Dijkstra from all sources with remaining supply.
        std::vector<double> dist(V, inf);
        std::vector<int> prev(V, -1);
        std::vector<char> done(V, 0);
        for (int i = 0; i < m; ++i)
            if (supply[i] > 0) dist[i] = 0.0;
        for (int iter = 0; iter < V; ++iter) {
            int u = -1;
            for (int v = 0; v < V; ++v)
                if (!done[v] && dist[v] < inf && (u == -1 || dist[v] < dist[u])) u = v;
            if (u == -1) break;
            done[u] = 1;
            if (u < m) {
                for (int j = 0; j < n; ++j) {
                    const double rc = std::max(0.0, cost(u, j) + pot[u] - pot[m + j]);
                    if (dist[u] + rc < dist[m + j]) {
                        dist[m + j] = dist[u] + rc;
                        prev[m + j] = u;
                    }
                }
            } else {
                const int j = u - m;
                for (int i = 0; i < m; ++i) {
                    if (flow(i, j) == 0) continue;
                    const double rc = std::max(0.0, -cost(i, j) + pot[u] - pot[i]);
                    if (dist[u] + rc < dist[i]) {
                        dist[i] = dist[u] + rc;
                        prev[i] = u;
                    }
                }
            }
        }
        // Closest sink with unmet demand.
        int target = -1;
        for (int j = 0; j < n; ++j)
            if (demand[j] > 0 && dist[m + j] < inf && (target == -1 || dist[m + j] < dist[m + target]))
                target = j;
        if (target == -1) throw std::runtime_error("min_cost_transport: no augmenting path");
        for (int v = 0; v < V; ++v)
            if (dist[v] < inf) pot[v] += std::min(dist[v], dist[m + target]);

        // Bottleneck along the alternating path.
        std::int64_t push = demand[target];
        for (int v = m + target; prev[v] != -1; v = prev[v]) {
            const int u = prev[v];
            if (u >= m) push = std::min(push, flow(v, u - m)); // backward arc sink->source
        }
        int path_head = m + target;
        while (prev[path_head] != -1) path_head = prev[path_head];
        push = std::min(push, supply[path_head]);

        for (int v = m + target; prev[v] != -1; v = prev[v]) {
            const int u = prev[v];
            if (u < m)
                flow(u, v - m) += push;
            else
                flow(v, u - m) -= push;
        }
        supply[path_head] -= push;
        demand[target] -= push;
        remaining -= push;
    }
    return flow;
}

// Dinic max-flow specialized to source -> left -> right -> sink with
// infinite-capacity middle arcs restricted by an adjacency mask.
struct BipartiteFlow {
    struct Arc {
        int to;
        std::int64_t cap;
        int rev;
    };
    std::vector<std::vector<Arc>> g;
    int S, T;

    BipartiteFlow(const std::vector<std::int64_t>& supply, const std::vector<std::int64_t>& demand,
                  const std::vector<std::vector<int>>& allowed) {
        const int m = static_cast<int>(supply.size());
        const int n = static_cast<int>(demand.size());
        S = m + n;
        T = m + n + 1;
        g.resize(m + n + 2);
        for (int i = 0; i < m; ++i) add_arc(S, i, supply[i]);
        for (int j = 0; j < n; ++j) add_arc(m + j, T, demand[j]);
        for (int i = 0; i < m; ++i)
            for (int j : allowed[i]) add_arc(i, m + j, std::numeric_limits<std::int64_t>::max() / 4);
    }

    void add_arc(int from, int to, std::int64_t cap) {
        g[from].push_back({to, cap, static_cast<int>(g[to].size())});
        g[to].push_back({from, 0, static_cast<int>(g[from].size()) - 1});
    }

    std::int64_t run() {
        std::int64_t total = 0;
        while (true) {
            std::vector<int> level(g.size(), -1);
            std::queue<int> q;
            level[S] = 0;
            q.push(S);
            while (!q.empty()) {
                const int u = q.front();
                q.pop();
                for (const Arc& a : g[u])
                    if (a.cap > 0 && level[a.to] < 0) {
                        level[a.to] = level[u] + 1;
                        q.push(a.to);
                    }
            }
            if (level[T] < 0) break;
            std::vector<size_t> it(g.size(), 0);
            while (std::int64_t pushed = dfs(S, std::numeric_limits<std::int64_t>::max() / 4, level, it))
                total += pushed;
        }
        return total;
    }

    std::int64_t dfs(int u, std::int64_t limit, const std::vector<int>& level, std::vector<size_t>& it) {
        if (u == T) return limit;
        for (; it[u] < g[u].size(); ++it[u]) {
            Arc& a = g[u][it[u]];
            if (a.cap <= 0 || level[a.to] != level[u] + 1) continue;
            const std::int64_t pushed = dfs(a.to, std::min(limit, a.cap), level, it);
            if (pushed > 0) {
                a.cap -= pushed;
                g[a.to][a.rev].cap += pushed;
                return pushed;
            }
        }
        return 0;
    }

    // Flow currently on the middle arc i -> m+j, read off the reverse capacities.
    Matrix middle_flow(int m, int n) const {
        Matrix f = Matrix::Zero(m, n);
        for (int i = 0; i < m; ++i)
            for (const Arc& a : g[i])
                if (a.to >= m && a.to < m + n)
                    f(i, a.to - m) = static_cast<double>(g[a.to][a.rev].cap);
        return f;
    }
};

double assignment_value(const Matrix& cost, const std::vector<int>& match, int N, int p) {
    double sum = 0.0;
    for (int i = 0; i < N; ++i) sum += cost(i, match[i]);
    return std::pow(sum / N, 1.0 / p);
}

}  // namespace

Matrix distance_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, TransportMetric metric) {
    if (mu.dim() != nu.dim()) throw std::invalid_argument("transport: dimension mismatch");
    Matrix d(mu.size(), nu.size());
    for (int i = 0; i < mu.size(); ++i)
        for (int j = 0; j < nu.size(); ++j)
            d(i, j) = point_distance(mu.points().col(i), nu.points().col(j), metric);
    return d;
}

namespace detail {

std::vector<int> solve_assignment(const Matrix& cost) {
    // Shortest-augmenting-path Hungarian algorithm with row/column potentials,
    // carried in double-double so optimality decisions are exact.
    const int n = static_cast<int>(cost.rows());
    const DD huge = DD::from(1e300); // finite sentinel; keeps DD ops NaN-free
    std::vector<DD> u(n + 1), v(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<DD> minv(n + 1, huge);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            DD delta = huge;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const DD cur = DD::from(cost(i0 - 1, j - 1)) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] = u[p[j]] + delta;
                    v[j] = v[j] - delta;
                } else {
                    minv[j] = minv[j] - delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> match(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) match[p[j] - 1] = j - 1;
    return match;
}

}  // namespace detail

std::pair<double, TransportPlan> dp_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                             int p, TransportMetric metric) {
    if (p != 1 && p != 2) throw std::invalid_argument("dp_distance: p must be 1 or 2");
    const Matrix dist = distance_matrix(mu, nu, metric);
    const Matrix cost = (p == 1) ? dist : Matrix(dist.array().square());

    TransportPlan plan;
    plan.rows = mu.size();
    plan.cols = nu.size();
    plan.cost_exponent = p;
    plan.metric = metric;

    if (mu.size() == nu.size() && is_uniform(mu) && is_uniform(nu)) {
        const int N = mu.size();
        const std::vector<int> match = detail::solve_assignment(cost);
        plan.mass = Matrix::Zero(N, N);
        for (int i = 0; i < N; ++i) plan.mass(i, match[i]) = 1.0 / N;
        return {assignment_value(cost, match, N, p), plan};
    }

    const auto flow = min_cost_transport(weights_to_grid(mu.weights()), weights_to_grid(nu.weights()), cost);
    plan.mass = flow.cast<double>() * kMassGrid;
    double total = 0.0;
    for (int i = 0; i < plan.rows; ++i)
        for (int j = 0; j < plan.cols; ++j) total += plan.mass(i, j) * cost(i, j);
    return {std::pow(total, 1.0 / p), plan};
}

std::pair<double, TransportPlan> dinf_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                               TransportMetric metric) {
    const Matrix dist = distance_matrix(mu, nu, metric);
    const int m = mu.size();
    const int n = nu.size();
    std::vector<double> levels(dist.data(), dist.data() + dist.size());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    // Uniform pairs get exact common-denominator units; otherwise weights are
    // rounded to the grid and the flow relaxation is taken as the definition.
    std::vector<std::int64_t> supply, demand;
    std::int64_t total_units;
    if (is_uniform(mu) && is_uniform(nu)) {
        const std::int64_t L = std::lcm<std::int64_t>(m, n);
        supply.assign(m, L / m);
        demand.assign(n, L / n);
        total_units = L;
    } else {
        supply = weights_to_grid(mu.weights());
        demand = weights_to_grid(nu.weights());
        total_units = kGridTotal;
    }

    auto solve_at = [&](double t) {
        std::vector<std::vector<int>> allowed(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
                if (dist(i, j) <= t) allowed[i].push_back(j);
        BipartiteFlow net(supply, demand, allowed);
        const std::int64_t value = net.run();
        return std::make_pair(value == total_units, net.middle_flow(m, n));
    };

    // Smallest distance level with a feasible coupling; the top level is the
    // complete bipartite graph and always feasible.
    int lo = 0, hi = static_cast<int>(levels.size()) - 1;
    while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (solve_at(levels[mid]).first)
            hi = mid;
        else
            lo = mid + 1;
    }
    auto [feasible, flow] = solve_at(levels[lo]);
    if (!feasible) throw std::runtime_error("dinf_distance: no feasible coupling (cannot happen)");

    TransportPlan plan;
    plan.rows = m;
    plan.cols = n;
    plan.cost_exponent = std::numeric_limits<double>::infinity();
    plan.metric = metric;
    plan.mass = flow / static_cast<double>(total_units);
    return {levels[lo], plan};
}

double assignment_bruteforce(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int p,
                             TransportMetric metric) {
    if (mu.size() != nu.size()) throw std::invalid_argument("assignment_bruteforce: sizes differ");
    if (!is_uniform(mu) || !is_uniform(nu))
        throw std::invalid_argument("assignment_bruteforce: both measures must be uniform");
    const int N = mu.size();
    if (N > 8) throw std::invalid_argument("assignment_bruteforce: N > 8");
    const bool bottleneck = (p < 0);
    if (!bottleneck && p != 1 && p != 2)
        throw std::invalid_argument("assignment_bruteforce: p must be 1, 2, or negative for bottleneck");

    const Matrix dist = distance_matrix(mu, nu, metric);
    const Matrix cost = bottleneck ? dist : (p == 1 ? dist : Matrix(dist.array().square()));

    std::vector<int> perm(N);
    std::iota(perm.begin(), perm.end(), 0);
    if (bottleneck) {
        double best = std::numeric_limits<double>::infinity();
        do {
            double value = 0.0;
            for (int i = 0; i < N; ++i) value = std::max(value, cost(i, perm[i]));
            best = std::min(best, value);
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }

    // Rank permutations by exact (double-double) sums, mirroring the solver's
    // decision arithmetic, then report the plain fixed-order value of the
    // winner.
    std::vector<int> best_perm = perm;
    DD best_sum = DD::from(1e300); // finite sentinel; inf - inf would NaN the comparator
    do {
        DD sum = DD::from(0.0);
        for (int i = 0; i < N; ++i) sum = sum + DD::from(cost(i, perm[i]));
        if (sum < best_sum) {
            best_sum = sum;
            best_perm = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return assignment_value(cost, best_perm, N, p);
}

}  // namespace projang
