#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace wbf {

// Uncapacitated min-cost flow on a dense graph by successive shortest paths
// (Dijkstra on reduced costs). cost(u,v) returns +inf when there is no arc
// u->v; all finite costs must be >= 0. Node balances: > 0 supply, < 0 demand.
// Source and target of each augmentation are the lowest-index eligible
// nodes, so the returned plan is a deterministic function of the input.
template <class CostFn>
class DenseMinCostFlow {
public:
    enum class Status { optimal, infeasible };

    DenseMinCostFlow(int n_nodes, CostFn cost)
        : n_(n_nodes), cost_(cost), excess_(n_nodes, 0.0), pi_(n_nodes, 0.0),
          flow_(static_cast<std::size_t>(n_nodes) * n_nodes, 0.0) {}

    void set_balance(int u, double b) { excess_[u] = b; }

    Status solve() {
        double scale = 1.0;
        for (double e : excess_) scale = std::max(scale, std::abs(e));
        double total_abs = 0.0;
        for (double e : excess_) total_abs += std::abs(e);
        mass_tol_ = 1e-14 * std::max(1.0, total_abs);
        const double flow_tol = 1e-15 * scale;

        std::vector<double> dist(n_);
        std::vector<int> parent(n_);
        std::vector<char> reverse(n_), settled(n_);
        const double inf = std::numeric_limits<double>::infinity();

        for (int iter = 0;; ++iter) {
            int s = -1;
            for (int u = 0; u < n_; ++u)
                if (excess_[u] > mass_tol_) { s = u; break; }
            if (s < 0) return status_ = Status::optimal;

            std::fill(dist.begin(), dist.end(), inf);
            std::fill(settled.begin(), settled.end(), 0);
            std::fill(parent.begin(), parent.end(), -1);
            dist[s] = 0.0;
            int t = -1;
            for (;;) {
                int u = -1;
                double best = inf;
                for (int v = 0; v < n_; ++v)
                    if (!settled[v] && dist[v] < best) { best = dist[v]; u = v; }
                if (u < 0) break;
                settled[u] = 1;
                if (excess_[u] < -mass_tol_) { t = u; break; }
                for (int v = 0; v < n_; ++v) {
                    if (settled[v] || v == u) continue;
                    double rc = inf;
                    char rev = 0;
                    const double c = cost_(u, v);
                    if (c < inf) rc = c + pi_[u] - pi_[v];
                    if (flow(v, u) > flow_tol) {
                        const double rr = -cost_(v, u) + pi_[u] - pi_[v];
                        if (rr < rc) { rc = rr; rev = 1; }
                    }
                    if (rc == inf) continue;
                    const double nd = dist[u] + std::max(rc, 0.0);
                    if (nd < dist[v]) {
                        dist[v] = nd;
                        parent[v] = u;
                        reverse[v] = rev;
                    }
                }
            }
            if (t < 0) {
                double left = 0.0;
                for (double e : excess_) left += std::max(e, 0.0);
                // leftovers of the order of the input's balance tolerance are not infeasibility
                if (left <= 1e-11 * std::max(1.0, total_abs)) return status_ = Status::optimal;
                return status_ = Status::infeasible;
            }
            for (int v = 0; v < n_; ++v) pi_[v] += std::min(dist[v], dist[t]);

            double delta = std::min(excess_[s], -excess_[t]);
            for (int v = t; v != s; v = parent[v])
                if (reverse[v]) delta = std::min(delta, flow(v, parent[v]));
            for (int v = t; v != s; v = parent[v]) {
                const int u = parent[v];
                if (reverse[v]) {
                    double& f = flow_ref(v, u);
                    f -= delta;
                    if (f <= flow_tol) f = 0.0;
                } else {
                    flow_ref(u, v) += delta;
                }
            }
            excess_[s] -= delta;
            excess_[t] += delta;
        }
    }

    Status status() const { return status_; }
    double flow(int u, int v) const { return flow_[static_cast<std::size_t>(u) * n_ + v]; }
    const std::vector<double>& potentials() const { return pi_; }

    double total_cost() const {
        double s = 0.0;
        for (int u = 0; u < n_; ++u)
            for (int v = 0; v < n_; ++v) {
                const double f = flow(u, v);
                if (f > 0.0) s += f * cost_(u, v);
            }
        return s;
    }

    // Complementary-slackness certificate from the final potentials:
    // reduced costs >= 0 on every arc and == 0 on arcs carrying flow.
    double optimality_violation() const {
        double worst = 0.0;
        const double inf = std::numeric_limits<double>::infinity();
        for (int u = 0; u < n_; ++u)
            for (int v = 0; v < n_; ++v) {
                const double c = cost_(u, v);
                if (!(c < inf)) continue;
                const double rc = c + pi_[u] - pi_[v];
                worst = std::max(worst, -rc);
                if (flow(u, v) > 0.0) worst = std::max(worst, std::abs(rc));
            }
        return worst;
    }

private:
    double& flow_ref(int u, int v) { return flow_[static_cast<std::size_t>(u) * n_ + v]; }

    int n_;
    CostFn cost_;
    std::vector<double> excess_;
    std::vector<double> pi_;
    std::vector<double> flow_;
    double mass_tol_ = 0.0;
    Status status_ = Status::optimal;
};

} // namespace wbf
