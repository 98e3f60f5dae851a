#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <tuple>
#include <vector>

#include "wbf/measures.hpp"
#include "wbf/mincost_flow.hpp"

namespace wbf {

enum class PlanKind { wb2, wb2tilde, t };

struct PlanEntry {
    int a = 0;  // first-marginal support node, 0..n+1
    int b = 0;  // second-marginal support node
    double mass = 0.0;
    friend bool operator==(const PlanEntry&, const PlanEntry&) = default;
};

struct TransportPlan {
    Grid grid;
    PlanKind kind = PlanKind::wb2tilde;
    std::vector<PlanEntry> entries;  // sorted by (a, b), no duplicates

    double cost2() const {
        double s = 0.0;
        for (const auto& e : entries) {
            const double d = grid.node(e.a) - grid.node(e.b);
            s += d * d * e.mass;
        }
        return s;
    }
    double total_mass() const {
        double s = 0.0;
        for (const auto& e : entries) s += e.mass;
        return s;
    }
    std::vector<double> first_marginal() const {
        std::vector<double> m(grid.n_nodes(), 0.0);
        for (const auto& e : entries) m[e.a] += e.mass;
        return m;
    }
    std::vector<double> second_marginal() const {
        std::vector<double> m(grid.n_nodes(), 0.0);
        for (const auto& e : entries) m[e.b] += e.mass;
        return m;
    }
    TransportPlan transposed() const {
        TransportPlan t{grid, kind, {}};
        t.entries.reserve(entries.size());
        for (const auto& e : entries) t.entries.push_back({e.b, e.a, e.mass});
        t.normalize();
        return t;
    }
    // sort and merge duplicate pairs
    void normalize() {
        std::sort(entries.begin(), entries.end(),
                  [](const PlanEntry& x, const PlanEntry& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
        std::vector<PlanEntry> out;
        for (const auto& e : entries) {
            if (!out.empty() && out.back().a == e.a && out.back().b == e.b)
                out.back().mass += e.mass;
            else
                out.push_back(e);
        }
        entries = std::move(out);
    }
};

enum class CostStatus { optimal, infeasible };

struct CostResult {
    double cost = 0.0;   // the distance value, i.e. sqrt of the optimal plan cost; +inf if infeasible
    double cost2 = 0.0;  // optimal plan cost sum |a-b|^2 gamma(a,b)
    std::optional<TransportPlan> plan;
    CostStatus status = CostStatus::optimal;
    double certificate = 0.0;  // max complementary-slackness violation of the solver duals
    bool infinite() const { return status == CostStatus::infeasible; }
};

inline void write_plan(const TransportPlan& plan, std::ostream& os) {
    os << "a_index,b_index,mass\n";
    for (const auto& e : plan.entries) os << e.a << ',' << e.b << ',' << detail::fmt_double(e.mass) << '\n';
}

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool lex_less(const SignedMeasure& x, const SignedMeasure& y) {
    return std::tie(x.interior, x.b0, x.b1) < std::tie(y.interior, y.b0, y.b1);
}

// Network for the boundary-reservoir programs between mu (rows) and nu
// (columns). Nodes: rows 0..n-1, columns n..2n-1, boundary 2n (x=0) and 2n+1 (x=1).
inline CostResult solve_signed(const SignedMeasure& mu, const SignedMeasure& nu, bool allow_boundary_pairs) {
    require_same_grid(mu.grid, nu.grid);
    const Grid& g = mu.grid;
    const int n = g.n();
    const int B0 = 2 * n, B1 = 2 * n + 1;
    auto pos = [&](int u) {
        if (u < n) return g.center(u);
        if (u < 2 * n) return g.center(u - n);
        return u == B0 ? 0.0 : 1.0;
    };
    auto cost = [n, B0, allow_boundary_pairs, pos](int u, int v) -> double {
        const bool ur = u < n, uc = u >= n && u < 2 * n, ub = u >= 2 * n;
        const bool vc = v >= n && v < 2 * n, vb = v >= 2 * n;
        (void)B0;
        if (uc) return kInf;
        if (ur && (vc || vb)) {
            const double d = pos(u) - pos(v);
            return d * d;
        }
        if (ub && vc) {
            const double d = pos(u) - pos(v);
            return d * d;
        }
        if (ub && vb && u != v && allow_boundary_pairs) return 1.0;
        return kInf;
    };
    DenseMinCostFlow<decltype(cost)> mcf(2 * n + 2, cost);
    for (int c = 0; c < n; ++c) {
        mcf.set_balance(c, mu.interior[c]);
        mcf.set_balance(n + c, -nu.interior[c]);
    }
    mcf.set_balance(B0, mu.b0 - nu.b0);
    mcf.set_balance(B1, mu.b1 - nu.b1);
    CostResult res;
    if (mcf.solve() == DenseMinCostFlow<decltype(cost)>::Status::infeasible) {
        res.status = CostStatus::infeasible;
        res.cost = res.cost2 = kInf;
        return res;
    }
    TransportPlan plan{g, allow_boundary_pairs ? PlanKind::wb2tilde : PlanKind::t, {}};
    auto node_of = [&](int u) {
        if (u < n) return u + 1;
        if (u < 2 * n) return u - n + 1;
        return u == B0 ? 0 : n + 1;
    };
    const int V = 2 * n + 2;
    for (int u = 0; u < V; ++u)
        for (int v = 0; v < V; ++v) {
            const double f = mcf.flow(u, v);
            if (f > 0.0) plan.entries.push_back({node_of(u), node_of(v), f});
        }
    plan.normalize();
    res.cost2 = plan.cost2();
    res.cost = std::sqrt(res.cost2);
    res.certificate = mcf.optimality_violation();
    res.plan = std::move(plan);
    return res;
}

} // namespace detail

// Signed programs are evaluated in a canonical orientation (lexicographically
// smaller argument first) so that d(mu,nu) and d(nu,mu) are bit-identical.
inline CostResult wb2tilde(const SignedMeasure& mu, const SignedMeasure& nu) {
    if (detail::lex_less(nu, mu)) {
        CostResult r = detail::solve_signed(nu, mu, true);
        if (r.plan) r.plan = r.plan->transposed();
        return r;
    }
    return detail::solve_signed(mu, nu, true);
}

inline CostResult t_cost(const SignedMeasure& mu, const SignedMeasure& nu) {
    if (detail::lex_less(nu, mu)) {
        CostResult r = detail::solve_signed(nu, mu, false);
        if (r.plan) r.plan = r.plan->transposed();
        return r;
    }
    return detail::solve_signed(mu, nu, false);
}

namespace detail {

// Interior-only program: boundary marginals free, so both boundary points
// merge into one reservoir node reached at the distance to the nearer end.
inline CostResult solve_wb2(const InteriorMeasure& mu, const InteriorMeasure& nu) {
    require_same_grid(mu.grid, nu.grid);
    const Grid& g = mu.grid;
    const int n = g.n();
    const int Z = 2 * n;
    auto nearest = [&](int c) { return g.center(c) <= 0.5 ? 0 : 1; };
    auto bdist2 = [&](int c) {
        const double x = g.center(c);
        const double d = std::min(x, 1.0 - x);
        return d * d;
    };
    auto cost = [n, Z, &g, bdist2](int u, int v) -> double {
        if (u < n) {
            if (v >= n && v < 2 * n) {
                const double d = g.center(u) - g.center(v - n);
                return d * d;
            }
            if (v == Z) return bdist2(u);
            return kInf;
        }
        if (u == Z && v >= n && v < 2 * n) return bdist2(v - n);
        return kInf;
    };
    DenseMinCostFlow<decltype(cost)> mcf(2 * n + 1, cost);
    for (int c = 0; c < n; ++c) {
        mcf.set_balance(c, mu.mass[c]);
        mcf.set_balance(n + c, -nu.mass[c]);
    }
    mcf.set_balance(Z, nu.total() - mu.total());
    mcf.solve();
    TransportPlan plan{g, PlanKind::wb2, {}};
    for (int u = 0; u <= Z; ++u)
        for (int v = 0; v <= Z; ++v) {
            const double f = mcf.flow(u, v);
            if (!(f > 0.0)) continue;
            if (u < n && v < 2 * n) plan.entries.push_back({u + 1, v - n + 1, f});
            else if (u < n) plan.entries.push_back({u + 1, nearest(u) == 0 ? 0 : n + 1, f});
            else plan.entries.push_back({nearest(v - n) == 0 ? 0 : n + 1, v - n + 1, f});
        }
    plan.normalize();
    CostResult res;
    res.cost2 = plan.cost2();
    res.cost = std::sqrt(res.cost2);
    res.certificate = mcf.optimality_violation();
    res.plan = std::move(plan);
    return res;
}

} // namespace detail

inline CostResult wb2(const InteriorMeasure& mu, const InteriorMeasure& nu) {
    if (nu.mass < mu.mass) {
        CostResult r = detail::solve_wb2(nu, mu);
        if (r.plan) r.plan = r.plan->transposed();
        return r;
    }
    return detail::solve_wb2(mu, nu);
}

struct AdmissibilityReport {
    bool admissible = false;
    double negative_entries = 0.0;   // magnitude of the most negative entry
    double row_residual = 0.0;       // interior first marginal vs mu
    double column_residual = 0.0;    // interior second marginal vs nu
    double balance_residual0 = 0.0;  // (row - column) at 0 vs mu(0) - nu(0)
    double balance_residual1 = 0.0;
    double boundary_pair_mass = 0.0; // mass on boundary x boundary (forbidden for t)
};

inline AdmissibilityReport check_admissible(const TransportPlan& plan, const SignedMeasure& mu,
                                            const SignedMeasure& nu, PlanKind kind, double tol = 1e-9) {
    require_same_grid(plan.grid, mu.grid);
    require_same_grid(plan.grid, nu.grid);
    const int n = plan.grid.n();
    AdmissibilityReport r;
    for (const auto& e : plan.entries) {
        r.negative_entries = std::max(r.negative_entries, -e.mass);
        if (Grid::is_boundary_node(e.a, n) && Grid::is_boundary_node(e.b, n) && e.a != e.b)
            r.boundary_pair_mass += std::abs(e.mass);
    }
    const auto p1 = plan.first_marginal();
    const auto p2 = plan.second_marginal();
    for (int c = 0; c < n; ++c) {
        r.row_residual = std::max(r.row_residual, std::abs(p1[c + 1] - mu.interior[c]));
        r.column_residual = std::max(r.column_residual, std::abs(p2[c + 1] - nu.interior[c]));
    }
    if (kind != PlanKind::wb2) {
        r.balance_residual0 = std::abs((p1[0] - p2[0]) - (mu.b0 - nu.b0));
        r.balance_residual1 = std::abs((p1[n + 1] - p2[n + 1]) - (mu.b1 - nu.b1));
    }
    r.admissible = r.negative_entries <= tol && r.row_residual <= tol && r.column_residual <= tol &&
                   r.balance_residual0 <= tol && r.balance_residual1 <= tol &&
                   (kind != PlanKind::t || r.boundary_pair_mass <= tol);
    return r;
}

inline AdmissibilityReport check_admissible(const TransportPlan& plan, const InteriorMeasure& mu,
                                            const InteriorMeasure& nu, double tol = 1e-9) {
    const SignedMeasure m{mu.grid, mu.mass, 0.0, 0.0}, v{nu.grid, nu.mass, 0.0, 0.0};
    return check_admissible(plan, m, v, PlanKind::wb2, tol);
}

// Classical balanced W2^2 on the line between two discrete measures given on
// increasing positions (monotone rearrangement / north-west corner rule).
inline double w2_squared_1d(const std::vector<double>& xa, std::vector<double> ma,
                            const std::vector<double>& xb, std::vector<double> mb) {
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < ma.size() && j < mb.size()) {
        if (ma[i] <= 0.0) { ++i; continue; }
        if (mb[j] <= 0.0) { ++j; continue; }
        const double m = std::min(ma[i], mb[j]);
        const double d = xa[i] - xb[j];
        s += m * d * d;
        ma[i] -= m;
        mb[j] -= m;
        if (ma[i] <= 0.0) ++i;
        else ++j;
    }
    return s;
}

struct RestrictedOptimality {
    bool optimal = false;
    double plan_cost2 = 0.0;
    double w2_cost2 = 0.0;
};

// Is the restriction of an optimal plan to A x B W2-optimal between its own
// marginals? A and B are sets of support nodes.
inline RestrictedOptimality restricted_w2_optimality(const TransportPlan& plan, const std::vector<int>& A,
                                                     const std::vector<int>& B, double tol = 1e-9) {
    const int K = plan.grid.n_nodes();
    std::vector<char> inA(K, 0), inB(K, 0);
    for (int a : A) inA.at(a) = 1;
    for (int b : B) inB.at(b) = 1;
    if (plan.kind == PlanKind::t) {
        const int n = plan.grid.n();
        for (int a : A)
            for (int b : B)
                if (a != b && Grid::is_boundary_node(a, n) && Grid::is_boundary_node(b, n))
                    throw Error(Errc::PreconditionViolated, "A x B meets boundary x boundary for a t-plan");
    }
    std::vector<double> m1(K, 0.0), m2(K, 0.0);
    RestrictedOptimality r;
    for (const auto& e : plan.entries) {
        if (!inA[e.a] || !inB[e.b]) continue;
        m1[e.a] += e.mass;
        m2[e.b] += e.mass;
        const double d = plan.grid.node(e.a) - plan.grid.node(e.b);
        r.plan_cost2 += d * d * e.mass;
    }
    const auto x = plan.grid.support_nodes();
    r.w2_cost2 = w2_squared_1d(x, m1, x, m2);
    r.optimal = r.plan_cost2 <= r.w2_cost2 + tol;
    return r;
}

} // namespace wbf
