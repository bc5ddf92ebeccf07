#pragma once

// Independent reference computations used only by tests. Each one follows
// the metric definition directly (exhaustive search, double loops, flow on
// the transport polytope) and deliberately shares no code with the library
// implementations it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace oracle {

// max-min double loop, same arithmetic as the definition.
inline double directed_hausdorff(const std::vector<std::vector<double>>& a,
                                 const std::vector<std::vector<double>>& b) {
    double worst = 0.0;
    for (const auto& x : a) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& y : b) {
            double s = 0.0;
            for (std::size_t c = 0; c < x.size(); ++c) {
                double d = x[c] - y[c];
                s += d * d;
            }
            best = std::min(best, std::sqrt(s));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

// Complete search over all monotone alignments (steps (1,0),(0,1),(1,1))
// with branch-and-bound pruning; pruning only discards branches whose
// partial cost already reaches the best complete alignment found, which is
// sound because every step adds a non-negative distance.
class DtwEnumerator {
public:
    double run(const std::vector<std::vector<double>>& a,
               const std::vector<std::vector<double>>& b) {
        n_ = a.size();
        m_ = b.size();
        dist_.assign(n_ * m_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < m_; ++j) {
                double s = 0.0;
                for (std::size_t c = 0; c < a[i].size(); ++c) {
                    double d = a[i][c] - b[j][c];
                    s += d * d;
                }
                dist_[i * m_ + j] = std::sqrt(s);
            }
        }
        best_ = std::numeric_limits<double>::infinity();
        dfs(0, 0, 0.0);
        return best_;
    }

private:
    void dfs(std::size_t i, std::size_t j, double acc) {
        acc += dist_[i * m_ + j];
        if (acc >= best_) return;
        if (i == n_ - 1 && j == m_ - 1) {
            best_ = acc;
            return;
        }
        if (i + 1 < n_ && j + 1 < m_) dfs(i + 1, j + 1, acc);
        if (i + 1 < n_) dfs(i + 1, j, acc);
        if (j + 1 < m_) dfs(i, j + 1, acc);
    }

    std::size_t n_ = 0, m_ = 0;
    std::vector<double> dist_;
    double best_ = 0.0;
};

// Exact 1-D optimal transport between uniform empirical measures, solved as
// min-cost max-flow on the bipartite transport graph. Masses are scaled by
// n*m so all capacities are integral (the transport LP has an integral
// optimum on this scaling).
inline double wasserstein_mincost(const std::vector<double>& u, const std::vector<double>& w) {
    const int n = int(u.size()), m = int(w.size());
    const int source = n + m, sink = n + m + 1, nodes = n + m + 2;

    struct Edge {
        int to, cap;
        double cost;
        int rev;
    };
    std::vector<std::vector<Edge>> graph(nodes);
    auto add_edge = [&](int from, int to, int cap, double cost) {
        graph[from].push_back({to, cap, cost, int(graph[to].size())});
        graph[to].push_back({from, 0, -cost, int(graph[from].size()) - 1});
    };
    for (int i = 0; i < n; ++i) add_edge(source, i, m, 0.0);
    for (int j = 0; j < m; ++j) add_edge(n + j, sink, n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) add_edge(i, n + j, n * m, std::abs(u[i] - w[j]));

    // successive shortest paths (Bellman-Ford handles the residual graph)
    double total_cost = 0.0;
    int remaining = n * m;
    while (remaining > 0) {
        std::vector<double> dist(nodes, std::numeric_limits<double>::infinity());
        std::vector<int> prev_node(nodes, -1), prev_edge(nodes, -1);
        dist[source] = 0.0;
        bool changed = true;
        while (changed) {
            changed = false;
            for (int v = 0; v < nodes; ++v) {
                if (dist[v] == std::numeric_limits<double>::infinity()) continue;
                for (std::size_t e = 0; e < graph[v].size(); ++e) {
                    const Edge& edge = graph[v][e];
                    if (edge.cap > 0 && dist[v] + edge.cost < dist[edge.to] - 1e-15) {
                        dist[edge.to] = dist[v] + edge.cost;
                        prev_node[edge.to] = v;
                        prev_edge[edge.to] = int(e);
                        changed = true;
                    }
                }
            }
        }
        int flow = remaining;
        for (int v = sink; v != source; v = prev_node[v])
            flow = std::min(flow, graph[prev_node[v]][prev_edge[v]].cap);
        for (int v = sink; v != source; v = prev_node[v]) {
            Edge& e = graph[prev_node[v]][prev_edge[v]];
            e.cap -= flow;
            graph[v][e.rev].cap += flow;
            total_cost += flow * e.cost;
        }
        remaining -= flow;
    }
    return total_cost / double(n * m);
}

// Kendall tau-b by direct pair counting.
inline double kendall_pair_count(const std::vector<double>& a, const std::vector<double>& b) {
    double conc = 0, disc = 0, ta = 0, tb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            double da = a[i] - a[j], db = b[i] - b[j];
            if (da == 0 && db == 0) continue;
            if (da == 0)
                ++ta;
            else if (db == 0)
                ++tb;
            else if ((da > 0 && db > 0) || (da < 0 && db < 0))
                ++conc;
            else
                ++disc;
        }
    }
    return (conc - disc) / std::sqrt((conc + disc + ta) * (conc + disc + tb));
}

// Step-by-step simulation of the least-overlap greedy rule.
inline std::vector<std::size_t> greedy_simulation(const std::vector<std::vector<double>>& sim,
                                                  std::size_t n_select) {
    const std::size_t n = sim.size();
    std::vector<std::size_t> picked;
    std::vector<bool> taken(n, false);

    std::size_t seed = 0;
    double seed_mean = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double mean = 0;
        for (std::size_t j = 0; j < n; ++j) mean += sim[i][j];
        mean /= double(n);
        if (mean < seed_mean) {
            seed_mean = mean;
            seed = i;
        }
    }
    picked.push_back(seed);
    taken[seed] = true;
    while (picked.size() < n_select) {
        std::size_t arg = n;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            double worst = 0;
            for (std::size_t s : picked) worst = std::max(worst, sim[i][s]);
            if (worst < best) {
                best = worst;
                arg = i;
            }
        }
        picked.push_back(arg);
        taken[arg] = true;
    }
    return picked;
}

}  // namespace oracle
