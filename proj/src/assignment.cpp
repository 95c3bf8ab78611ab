#include "vortexlab/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace vtx {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// Shortest augmenting paths with potentials (Jonker-Volgenant style),
// 1-based internally with a virtual column 0.
AssignmentDuals min_cost_assignment_duals(const std::vector<double>& cost, int n) {
    if (n == 0) return {{}, {}, {}, 0.0};
    if (static_cast<int>(cost.size()) != n * n)
        throw std::invalid_argument("min_cost_assignment: cost matrix size mismatch");
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
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
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    AssignmentDuals out;
    out.match.assign(n, -1);
    double total = 0.0;
    for (int j = 1; j <= n; ++j) {
        if (p[j] > 0) {
            out.match[p[j] - 1] = j - 1;
            total += cost[(p[j] - 1) * n + (j - 1)];
        }
    }
    out.row_potential.assign(u.begin() + 1, u.end());
    out.col_potential.assign(v.begin() + 1, v.end());
    out.cost = total;
    return out;
}

std::vector<int> min_cost_assignment(const std::vector<double>& cost, int n, double* cost_out) {
    AssignmentDuals d = min_cost_assignment_duals(cost, n);
    if (cost_out) *cost_out = d.cost;
    return d.match;
}

namespace {

struct FlowEdge {
    int sink;
    double mass;
};

double get_flow(const std::vector<FlowEdge>& edges, int sink) {
    for (const auto& e : edges)
        if (e.sink == sink) return e.mass;
    return 0.0;
}

void add_flow(std::vector<FlowEdge>& edges, int sink, double delta) {
    for (auto& e : edges)
        if (e.sink == sink) {
            e.mass += delta;
            return;
        }
    edges.push_back({sink, delta});
}

}  // namespace

// Successive shortest augmenting paths with node potentials. One source with
// remaining supply is processed per Dijkstra; reduced costs stay nonnegative
// so paths are shortest in the original costs.
TransportPlan solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                              const std::function<double(int, int)>& cost, double balance_tol) {
    const int m = static_cast<int>(supply.size());
    const int k = static_cast<int>(demand.size());
    if (m == 0 && k == 0) return {0.0, {}};
    if (m == 0 || k == 0) throw std::invalid_argument("solve_transport: one-sided problem");
    double s_tot = 0.0, d_tot = 0.0;
    for (double s : supply) {
        if (s <= 0.0) throw std::invalid_argument("solve_transport: supplies must be positive");
        s_tot += s;
    }
    for (double d : demand) {
        if (d <= 0.0) throw std::invalid_argument("solve_transport: demands must be positive");
        d_tot += d;
    }
    if (std::fabs(s_tot - d_tot) > balance_tol * std::max(s_tot, d_tot))
        throw std::invalid_argument("solve_transport: unbalanced supply/demand");

    std::vector<double> c(static_cast<std::size_t>(m) * k);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j) c[static_cast<std::size_t>(i) * k + j] = cost(i, j);

    std::vector<double> rs(supply);
    double scale = d_tot / s_tot;
    for (double& s : rs) s *= scale;
    std::vector<double> rd(demand);

    std::vector<std::vector<FlowEdge>> flow(m);
    std::vector<std::vector<int>> rev(k);  // candidate sources per sink (may hold stale entries)
    std::vector<double> phi(m + k, 0.0);   // node potentials, sinks offset by m

    const double mass_eps = 1e-14 * d_tot;
    long max_augment = 50L * (m + k) + 1000;
    long rounds = 0;

    std::vector<double> dist(m + k);
    std::vector<int> prev(m + k);
    std::vector<char> done(m + k);

    for (int src = 0; src < m; ++src) {
        while (rs[src] > mass_eps) {
            if (++rounds > max_augment)
                throw std::runtime_error("solve_transport: augmentation cap hit");
            std::fill(dist.begin(), dist.end(), kInf);
            std::fill(prev.begin(), prev.end(), -1);
            std::fill(done.begin(), done.end(), 0);
            using QE = std::pair<double, int>;
            std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
            dist[src] = 0.0;
            pq.push({0.0, src});
            int sink_found = -1;
            while (!pq.empty()) {
                auto [dv, v] = pq.top();
                pq.pop();
                if (done[v]) continue;
                done[v] = 1;
                if (v >= m && rd[v - m] > mass_eps) {
                    sink_found = v - m;
                    break;
                }
                if (v < m) {
                    const double* ci = &c[static_cast<std::size_t>(v) * k];
                    for (int j = 0; j < k; ++j) {
                        int t = m + j;
                        if (done[t]) continue;
                        double nd = dv + std::max(0.0, ci[j] + phi[v] - phi[t]);
                        if (nd < dist[t]) {
                            dist[t] = nd;
                            prev[t] = v;
                            pq.push({nd, t});
                        }
                    }
                } else {
                    int j = v - m;
                    for (int i : rev[j]) {
                        if (done[i] || get_flow(flow[i], j) <= mass_eps) continue;
                        double nd = dv + std::max(0.0, -c[static_cast<std::size_t>(i) * k + j] +
                                                           phi[v] - phi[i]);
                        if (nd < dist[i]) {
                            dist[i] = nd;
                            prev[i] = v;
                            pq.push({nd, i});
                        }
                    }
                }
            }
            if (sink_found < 0) throw std::runtime_error("solve_transport: no augmenting path");
            double dstar = dist[m + sink_found];
            for (int v = 0; v < m + k; ++v)
                if (dist[v] < kInf) phi[v] += std::min(dist[v], dstar);

            std::vector<int> path;  // sink ... source node sequence
            for (int cur = m + sink_found; cur >= 0; cur = prev[cur]) path.push_back(cur);
            double delta = std::min(rs[src], rd[sink_found]);
            for (std::size_t a = 0; a + 1 < path.size(); ++a)
                if (path[a + 1] >= m)  // backward edge sink -> source
                    delta = std::min(delta, get_flow(flow[path[a]], path[a + 1] - m));
            for (std::size_t a = 0; a + 1 < path.size(); ++a) {
                int from = path[a + 1], to = path[a];
                if (from < m) {
                    if (get_flow(flow[from], to - m) == 0.0) rev[to - m].push_back(from);
                    add_flow(flow[from], to - m, delta);
                } else {
                    add_flow(flow[to], from - m, -delta);
                }
            }
            rs[src] -= delta;
            rd[sink_found] -= delta;
        }
    }

    TransportPlan plan;
    plan.shipments.assign(m, {});
    double total = 0.0;
    for (int i = 0; i < m; ++i)
        for (const auto& e : flow[i])
            if (e.mass > mass_eps) {
                plan.shipments[i].push_back({e.sink, e.mass});
                total += e.mass * c[static_cast<std::size_t>(i) * k + e.sink];
            }
    plan.cost = total;
    return plan;
}

}  // namespace vtx
