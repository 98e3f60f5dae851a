#pragma once

#include <cmath>
#include <vector>

#include "wbf/measures.hpp"

namespace wbf {

struct EnergyRecord {
    double entropy_E = 0.0;
    double boundary_term = 0.0;
    double total_H = 0.0;
};

// per-cell entropy in mass units: m log(m/h) + (V-1) m + h, with 0 log 0 = 0
inline double cell_entropy(double m, double v, double h) {
    const double ml = m > 0.0 ? m * std::log(m / h) : 0.0;
    return ml + (v - 1.0) * m + h;
}

inline double entropy_E(const InteriorMeasure& rho, const PotentialData& pot) {
    require_potential(rho.grid, pot);
    const double h = rho.grid.h();
    double e = 0.0;
    for (int c = 0; c < rho.grid.n(); ++c) e += cell_entropy(rho.mass[c], pot.v_center[c], h);
    return e;
}

inline EnergyRecord functional_H(const SignedMeasure& mu, const PotentialData& pot) {
    EnergyRecord r;
    r.entropy_E = entropy_E(restrict_interior(mu), pot);
    r.boundary_term = pot.psi0 * mu.b0 + pot.psi1 * mu.b1;
    r.total_H = r.entropy_E + r.boundary_term;
    return r;
}

// |mu([0,1])| + int_0^1 |mu((t,1])| dt for a signed measure given by its values
// on the support nodes; the tail is piecewise constant between nodes.
inline double kr_norm_nodes(const Grid& grid, const std::vector<double>& v) {
    const int K = grid.n_nodes();
    double total = 0.0;
    for (double x : v) total += x;
    double tail = total;
    double integral = 0.0;
    for (int k = 0; k + 1 < K; ++k) {
        tail -= v[k];
        integral += std::abs(tail) * (grid.node(k + 1) - grid.node(k));
    }
    return std::abs(total) + integral;
}

inline double kr_norm(const SignedMeasure& mu) { return kr_norm_nodes(mu.grid, mu.node_values()); }

inline double kr_norm_difference(const SignedMeasure& mu, const SignedMeasure& nu) {
    require_same_grid(mu.grid, nu.grid);
    std::vector<double> d = mu.node_values();
    const std::vector<double> w = nu.node_values();
    for (std::size_t k = 0; k < d.size(); ++k) d[k] -= w[k];
    return kr_norm_nodes(mu.grid, d);
}

inline double truncated_lq_norm(const InteriorMeasure& rho, const PotentialData& pot, double q, double theta) {
    if (!(q >= 1.0)) throw Error(Errc::InvalidExponent, "q must be >= 1");
    if (!(theta > 0.0)) throw Error(Errc::InvalidExponent, "theta must be > 0");
    require_potential(rho.grid, pot);
    const double h = rho.grid.h();
    double s = 0.0;
    for (int c = 0; c < rho.grid.n(); ++c) {
        const double v = pot.v_center[c];
        const double r = std::max(rho.mass[c] / h, theta * std::exp(-v));
        s += std::pow(r, q) * std::exp((q - 1.0) * v) * h;
    }
    return s;
}

} // namespace wbf
