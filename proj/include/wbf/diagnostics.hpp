#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "wbf/functionals.hpp"
#include "wbf/jko.hpp"
#include "wbf/measures.hpp"
#include "wbf/pde.hpp"
#include "wbf/transport.hpp"

namespace wbf {

struct SlopeResult {
    double value = 0.0;        // |dH|^2 or +inf
    double fisher_part = 0.0;  // 4 sum e^{-V} (D_h sqrt(rho e^V))^2 h, boundary half-faces included
    double boundary_violation = 0.0;  // max endpoint mismatch |f - e^{Psi/2}| / sqrt(h)
    bool finite() const { return std::isfinite(value); }
};

namespace detail {

inline SlopeResult slope_against(const InteriorMeasure& rho, const PotentialData& pot, double target0,
                                 double target1, double h_threshold) {
    const Grid& g = rho.grid;
    require_potential(g, pot);
    const int n = g.n();
    const double h = g.h();
    std::vector<double> f(n);
    for (int c = 0; c < n; ++c) f[c] = std::sqrt(rho.density(c) * std::exp(pot.v_center[c]));
    double s = 0.0;
    for (int k = 1; k < n; ++k) {
        const double d = f[k] - f[k - 1];
        s += std::exp(-pot.v_face[k]) * d * d / h;
    }
    const double g0 = f[0] - target0, g1 = f[n - 1] - target1;
    s += std::exp(-pot.v0()) * g0 * g0 / (0.5 * h) + std::exp(-pot.v1()) * g1 * g1 / (0.5 * h);
    SlopeResult r;
    r.fisher_part = 4.0 * s;
    r.boundary_violation = std::max(std::abs(g0), std::abs(g1)) / std::sqrt(h);
    r.value = r.boundary_violation > h_threshold ? std::numeric_limits<double>::infinity() : r.fisher_part;
    return r;
}

} // namespace detail

inline constexpr double kSlopeThreshold = 10.0;

// Squared descending slope of H; infinite when sqrt(rho e^V) misses e^{Psi/2}
// at an endpoint cell by more than h_threshold * sqrt(h).
inline SlopeResult slope(const SignedMeasure& mu, const PotentialData& pot, double h_threshold = kSlopeThreshold) {
    if (!std::isfinite(functional_H(mu, pot).total_H)) throw Error(Errc::InfiniteEnergy, "H(mu) is not finite");
    return detail::slope_against(restrict_interior(mu), pot, std::exp(0.5 * pot.psi0), std::exp(0.5 * pot.psi1),
                                 h_threshold);
}

// Same formula for the reservoir distance Wb2: boundary target is 1.
inline SlopeResult wb2_slope(const InteriorMeasure& rho, const PotentialData& pot,
                             double h_threshold = kSlopeThreshold) {
    return detail::slope_against(rho, pot, 1.0, 1.0, h_threshold);
}

struct EdiRecord {
    double t = 0.0;       // end of the step interval
    double dphi = 0.0;    // H(mu_{n+1}) - H(mu_n)
    double metric2 = 0.0; // squared metric speed integrated over the step: cost2 / tau
    double slope2 = 0.0;  // slope^2(mu_{n+1}) * tau
    double residual = 0.0;
};

struct EdiReport {
    std::vector<EdiRecord> records;
    double max_residual = -std::numeric_limits<double>::infinity();
    double mean_positive = 0.0;  // sum of positive residuals / t_end
    bool finite = true;
};

// Metric speed of a step: the step's own optimal plan cost, or the exact W~b2 LP
// between consecutive states on the support nodes.
enum class EdiMetric { step_cost, wb2tilde_lp };

// Discrete energy-dissipation defect per step:
//   H(mu_{n+1}) - H(mu_n) + d^2/(2 tau) + (tau/2) slope^2(mu_{n+1}).
inline EdiReport edi_report(const Trajectory& tr, const PotentialData& pot,
                            EdiMetric metric = EdiMetric::step_cost) {
    EdiReport rep;
    const double tau = tr.config.tau;
    double H_prev = functional_H(tr.states.front(), pot).total_H;
    double pos = 0.0;
    for (std::size_t k = 0; k < tr.steps.size(); ++k) {
        const auto& st = tr.steps[k];
        const double H_new = functional_H(st.minimizer, pot).total_H;
        EdiRecord r;
        r.t = tr.times[k + 1];
        r.dphi = H_new - H_prev;
        r.metric2 = (metric == EdiMetric::step_cost ? st.cost2 : wb2tilde(st.minimizer, tr.states[k]).cost2) / tau;
        r.slope2 = slope(st.minimizer, pot).value * tau;
        r.residual = r.dphi + 0.5 * r.metric2 + 0.5 * r.slope2;
        if (!std::isfinite(r.residual)) rep.finite = false;
        rep.max_residual = std::max(rep.max_residual, r.residual);
        pos += std::max(0.0, r.residual);
        rep.records.push_back(r);
        H_prev = H_new;
    }
    const double t_end = tr.times.back();
    rep.mean_positive = t_end > 0.0 ? pos / t_end : 0.0;
    return rep;
}

// Densities of a JKO trajectory in the FD table layout (for weak_form_residual).
inline DensityTable to_density_table(const Trajectory& tr) {
    DensityTable tab;
    tab.grid = tr.grid;
    tab.times = tr.times;
    for (const auto& s : tr.states) {
        std::vector<double> r(s.interior);
        for (double& x : r) x /= tr.grid.h();
        tab.density.push_back(std::move(r));
        tab.b0.push_back(s.b0);
        tab.b1.push_back(s.b1);
    }
    return tab;
}

// Displacement interpolation along an optimal W~b2 plan: each plan atom (a, b)
// moves to (1-t) a + t b and is deposited linearly on the two neighbouring
// support nodes; returns mu0 + nu_t - nu_0.
inline SignedMeasure geodesic_interpolate(const SignedMeasure& mu0, const SignedMeasure& mu1, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw Error(Errc::PreconditionViolated, "t must lie in [0,1]");
    const Grid& g = mu0.grid;
    const auto res = wb2tilde(mu0, mu1);
    const int K = g.n_nodes();
    const auto nodes = g.support_nodes();
    std::vector<double> out = mu0.node_values();
    for (const auto& e : res.plan->entries) {
        out[e.a] -= e.mass;
        const double x = (1.0 - t) * nodes[e.a] + t * nodes[e.b];
        const int hi = static_cast<int>(std::upper_bound(nodes.begin(), nodes.end(), x) - nodes.begin());
        if (hi >= K) {
            out[K - 1] += e.mass;
            continue;
        }
        const int lo = hi - 1;
        const double w = (x - nodes[lo]) / (nodes[hi] - nodes[lo]);
        out[lo] += (1.0 - w) * e.mass;
        out[hi] += w * e.mass;
    }
    SignedMeasure mu{g, std::vector<double>(out.begin() + 1, out.end() - 1), out.front(), out.back()};
    for (double& m : mu.interior) m = std::max(m, 0.0);  // round-off only: interior of nu_0 equals mu0's
    return mu;
}

// Chain plan along a boundary polyline in the plane: cost sum |p_{i+1} - p_i|^2.
inline double informloss_chain(const std::vector<std::array<double, 2>>& points) {
    if (points.size() < 2) throw Error(Errc::PreconditionViolated, "need at least two points");
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const double dx = points[i + 1][0] - points[i][0], dy = points[i + 1][1] - points[i][1];
        s += dx * dx + dy * dy;
    }
    return s;
}

// alpha(i/n), i = 0..n, on the quarter unit circle from (1,0) to (0,1)
inline std::vector<std::array<double, 2>> quarter_circle(int n) {
    if (n < 1) throw Error(Errc::PreconditionViolated, "n must be >= 1");
    std::vector<std::array<double, 2>> p(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double a = 0.5 * M_PI * i / n;
        p[i] = {std::cos(a), std::sin(a)};
    }
    return p;
}

struct NoncompleteRow {
    int n = 0;
    double interior_mass = 0.0;  // ||mu^n_Omega||
    double distance = 0.0;       // W~b2(mu^n, mu^{n+1})
    double partial_sum = 0.0;    // sum_{k<=n} W~b2(mu^k, mu^{k+1})
};

// mu^n = (1/x) 1_{(2^-n, 1)} dx - (its mass) delta_0
inline SignedMeasure noncomplete_member(const Grid& g, int n) {
    std::vector<double> m(g.n(), 0.0);
    const double lo = std::ldexp(1.0, -n);
    double total = 0.0;
    for (int c = 0; c < g.n(); ++c) {
        const double x = g.center(c);
        if (x > lo) {
            m[c] = g.h() / x;
            total += m[c];
        }
    }
    return SignedMeasure{g, std::move(m), -total, 0.0};
}

// Rows n = 1..n_max-1: distances between consecutive members.
inline std::vector<NoncompleteRow> noncomplete_demo(int n_max, const Grid& g) {
    if (n_max < 2) throw Error(Errc::PreconditionViolated, "n_max must be >= 2");
    if (std::ldexp(1.0, -n_max) < 2.0 * g.h()) throw Error(Errc::GridTooCoarse, "need 2^-n_max >= 2h");
    std::vector<NoncompleteRow> rows;
    SignedMeasure cur = noncomplete_member(g, 1);
    double sum = 0.0;
    for (int n = 1; n < n_max; ++n) {
        SignedMeasure next = noncomplete_member(g, n + 1);
        NoncompleteRow r;
        r.n = n;
        r.interior_mass = cur.interior_total();
        r.distance = wb2tilde(cur, next).cost;
        sum += r.distance;
        r.partial_sum = sum;
        rows.push_back(r);
        cur = std::move(next);
    }
    return rows;
}

// The notconv family t -> (1/t) 1_{(0,t)} - delta_0 reached along the geodesic
// from the zero measure to 1_{(0,1)} dx - delta_0.
struct ConvexityDefect {
    double s = 0.0;
    double H0 = 0.0, H1 = 0.0, Hs = 0.0;
    double defect = 0.0;  // H(mu_s) - ((1-s) H(mu_0) + s H(mu_1))
};

inline ConvexityDefect notconv_defect(const Grid& g, const PotentialData& pot, double s) {
    const SignedMeasure mu0{g, std::vector<double>(g.n(), 0.0), 0.0, 0.0};
    SignedMeasure mu1{g, std::vector<double>(g.n(), g.h()), -1.0, 0.0};
    const SignedMeasure mus = geodesic_interpolate(mu0, mu1, s);
    ConvexityDefect d;
    d.s = s;
    d.H0 = functional_H(mu0, pot).total_H;
    d.H1 = functional_H(mu1, pot).total_H;
    d.Hs = functional_H(mus, pot).total_H;
    d.defect = d.Hs - ((1.0 - s) * d.H0 + s * d.H1);
    return d;
}

struct ContractivityRow {
    double q = 1.0;
    int step = 0;  // 0 = initial datum
    double norm = 0.0;
    double decrement = 0.0;  // norm(step-1) - norm(step)
};

struct ContractivityReport {
    std::vector<ContractivityRow> rows;
    double max_increase = 0.0;
    bool increase_flagged = false;
};

// Truncated L^q norms with theta = theta0 along a trajectory.
inline ContractivityReport contractivity_report(const Trajectory& tr, const PotentialData& pot,
                                                const std::vector<double>& q_list) {
    ContractivityReport rep;
    const double theta = pot.theta0();
    for (double q : q_list) {
        double prev = 0.0;
        for (std::size_t k = 0; k < tr.states.size(); ++k) {
            const double v = truncated_lq_norm(restrict_interior(tr.states[k]), pot, q, theta);
            ContractivityRow r{q, static_cast<int>(k), v, k ? prev - v : 0.0};
            if (k) rep.max_increase = std::max(rep.max_increase, v - prev);
            rep.rows.push_back(r);
            prev = v;
        }
    }
    rep.increase_flagged = rep.max_increase > tr.config.solver_tol;
    return rep;
}

struct TrajectoryBounds {
    double max_interior_mass = 0.0;
    double mass_bound = 0.0;       // int rho_0 + theta0 int e^{-V}
    double sum_cost2 = 0.0;        // sum_n T^2(mu_n, mu_{n+1})
    double sum_cost2_constant = 0.0;  // sum_cost2 / (tau (1 + t_end))
    double tv_constant = 0.0;      // max_n ||mu_n|| / (1 + t_n + tau)
    double sobolev_average = 0.0;  // tau sum_{n>=1} boundary_sobolev_norm(rho_n) / (1 + t_end)
};

inline TrajectoryBounds trajectory_bounds(const Trajectory& tr, const PotentialData& pot) {
    TrajectoryBounds b;
    const Grid& g = tr.grid;
    const double tau = tr.config.tau;
    double ev = 0.0;
    for (double v : pot.v_center) ev += std::exp(-v) * g.h();
    b.mass_bound = tr.states.front().interior_total() + pot.theta0() * ev;
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
        const auto& s = tr.states[k];
        b.max_interior_mass = std::max(b.max_interior_mass, s.interior_total());
        const double tv = s.interior_total() + std::abs(s.b0) + std::abs(s.b1);
        b.tv_constant = std::max(b.tv_constant, tv / (1.0 + tr.times[k] + tau));
        if (k) b.sobolev_average += tau * boundary_sobolev_norm(restrict_interior(s), pot);
    }
    for (const auto& st : tr.steps) b.sum_cost2 += st.cost2;
    const double t_end = tr.times.back();
    b.sum_cost2_constant = b.sum_cost2 / (tau * (1.0 + t_end));
    b.sobolev_average /= (1.0 + t_end);
    return b;
}

} // namespace wbf
