#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "wbf/measures.hpp"
#include "wbf/tridiag.hpp"

namespace wbf {

struct FdConfig {
    double dt = 1e-3;
    double theta = 1.0;  // 1 = implicit Euler, 0.5 = Crank-Nicolson
    double t_end = 0.0;
    int record_every = 1;
};

// Densities at recorded times plus the boundary atoms that absorb the
// boundary fluxes, so every row is also an element of S.
struct DensityTable {
    Grid grid;
    std::vector<double> times;
    std::vector<std::vector<double>> density;
    std::vector<double> b0, b1;

    SignedMeasure measure(std::size_t k) const {
        std::vector<double> m(density[k]);
        for (double& x : m) x *= grid.h();
        return SignedMeasure{grid, std::move(m), b0[k], b1[k]};
    }
};

namespace detail {

// Flux through face k (k = 0..n) in the +x direction, u = rho e^V.
inline double fd_face_flux(const std::vector<double>& u, const PotentialData& pot, double h, int k) {
    const int n = static_cast<int>(u.size());
    if (k == 0) return std::exp(-pot.v0()) * (u[0] - std::exp(pot.psi0)) / (0.5 * h);
    if (k == n) return std::exp(-pot.v1()) * (std::exp(pot.psi1) - u[n - 1]) / (0.5 * h);
    return std::exp(-pot.v_face[k]) * (u[k] - u[k - 1]) / h;
}

} // namespace detail

// Same `t,node,value` layout as the JKO trajectory CSV (cell values are masses).
inline void write_density_table(std::ostream& os, const DensityTable& tab) {
    os << "t,node,value\n";
    for (std::size_t k = 0; k < tab.times.size(); ++k) {
        const std::string ts = detail::fmt_double(tab.times[k]);
        os << ts << ",b0," << detail::fmt_double(tab.b0[k]) << '\n';
        os << ts << ",b1," << detail::fmt_double(tab.b1[k]) << '\n';
        for (int c = 0; c < tab.grid.n(); ++c)
            os << ts << ",cell_" << (c + 1) << ',' << detail::fmt_double(tab.density[k][c] * tab.grid.h()) << '\n';
    }
}

inline DensityTable fd_solve(const InteriorMeasure& rho0, const PotentialData& pot, const FdConfig& cfg,
                             double b0_init = 0.0, double b1_init = 0.0) {
    const Grid& g = rho0.grid;
    require_potential(g, pot);
    if (!(cfg.dt > 0.0)) throw Error(Errc::PreconditionViolated, "dt must be > 0");
    if (!(cfg.theta >= 0.5 && cfg.theta <= 1.0)) throw Error(Errc::PreconditionViolated, "theta must be in [0.5,1]");
    for (double m : rho0.mass)
        if (!(m >= 0.0)) throw Error(Errc::NegativeDensity, "initial density must be nonnegative");
    const int n = g.n();
    const double h = g.h();
    const double th = cfg.theta;

    std::vector<double> ev(n), emv(n);
    for (int c = 0; c < n; ++c) {
        ev[c] = std::exp(pot.v_center[c]);
        emv[c] = 1.0 / ev[c];
    }
    // face conductances in  h * d rho_c/dt = F_{c+1} - F_c
    std::vector<double> kf(n + 1);
    kf[0] = std::exp(-pot.v0()) / (0.5 * h);
    kf[n] = std::exp(-pot.v1()) / (0.5 * h);
    for (int k = 1; k < n; ++k) kf[k] = std::exp(-pot.v_face[k]) / h;
    const double g0 = std::exp(pot.psi0), g1 = std::exp(pot.psi1);

    // (A u)_c = (kf[c+1](u_{c+1}-u_c) - kf[c](u_c-u_{c-1})) / h, Dirichlet data in bvec
    std::vector<double> sub(n, 0.0), dia(n, 0.0), sup(n, 0.0), bvec(n, 0.0);
    for (int c = 0; c < n; ++c) {
        dia[c] = -(kf[c] + kf[c + 1]) / h;
        if (c > 0) sub[c] = kf[c] / h;
        if (c + 1 < n) sup[c] = kf[c + 1] / h;
    }
    bvec[0] += kf[0] * g0 / h;
    bvec[n - 1] += kf[n] * g1 / h;

    std::vector<double> u(n);
    for (int c = 0; c < n; ++c) u[c] = rho0.density(c) * ev[c];

    DensityTable out;
    out.grid = g;
    double b0 = b0_init, b1 = b1_init;
    auto record = [&](double t) {
        out.times.push_back(t);
        std::vector<double> r(n);
        for (int c = 0; c < n; ++c) r[c] = u[c] * emv[c];
        out.density.push_back(std::move(r));
        out.b0.push_back(b0);
        out.b1.push_back(b1);
    };
    record(0.0);

    const int steps = cfg.t_end > 0.0 ? static_cast<int>(std::ceil(cfg.t_end / cfg.dt - 1e-9)) : 0;
    const double dt = steps > 0 ? cfg.t_end / steps : cfg.dt;
    std::vector<double> lsub(n), ldia(n), lsup(n), rhs(n);
    for (int c = 0; c < n; ++c) {
        lsub[c] = -dt * th * sub[c];
        lsup[c] = -dt * th * sup[c];
        ldia[c] = emv[c] - dt * th * dia[c];
    }
    for (int s = 1; s <= steps; ++s) {
        const double out0_old = kf[0] * (u[0] - g0);
        const double out1_old = kf[n] * (u[n - 1] - g1);
        for (int c = 0; c < n; ++c) {
            double au = dia[c] * u[c];
            if (c > 0) au += sub[c] * u[c - 1];
            if (c + 1 < n) au += sup[c] * u[c + 1];
            rhs[c] = emv[c] * u[c] + dt * (1.0 - th) * au + dt * bvec[c];
        }
        u = solve_tridiagonal(lsub, ldia, lsup, rhs);
        for (int c = 0; c < n; ++c)
            if (!std::isfinite(u[c])) throw Error(Errc::NonFiniteState, "FD state blew up at step " + std::to_string(s));
        const double out0_new = kf[0] * (u[0] - g0);
        const double out1_new = kf[n] * (u[n - 1] - g1);
        b0 += dt * (th * out0_new + (1.0 - th) * out0_old);
        b1 += dt * (th * out1_new + (1.0 - th) * out1_old);
        if (s % std::max(1, cfg.record_every) == 0 || s == steps) record(s * dt);
    }
    return out;
}

// max over recorded s < t of | int phi d rho_t - int phi d rho_s - int_s^t int (phi'' - phi' V') rho |,
// time integral by the trapezoid rule over the recorded times.
inline double weak_form_residual(const DensityTable& tab, const PotentialData& pot, const std::vector<double>& phi) {
    const Grid& g = tab.grid;
    const int n = g.n();
    const double h = g.h();
    if (static_cast<int>(phi.size()) != n) throw Error(Errc::GridMismatch, "test function length");
    if (phi.front() != 0.0 || phi.back() != 0.0)
        throw Error(Errc::PreconditionViolated, "test function must vanish on the boundary cells");
    std::vector<double> L(n, 0.0);
    for (int c = 1; c + 1 < n; ++c) {
        const double lap = (phi[c + 1] - 2.0 * phi[c] + phi[c - 1]) / (h * h);
        const double dphi = (phi[c + 1] - phi[c - 1]) / (2.0 * h);
        const double dv = (pot.v_face[c + 1] - pot.v_face[c]) / h;
        L[c] = lap - dphi * dv;
    }
    auto pair = [&](const std::vector<double>& rho) {
        double m = 0.0, l = 0.0;
        for (int c = 0; c < n; ++c) {
            m += phi[c] * rho[c] * h;
            l += L[c] * rho[c] * h;
        }
        return std::pair{m, l};
    };
    double integral = 0.0, dmax = -1e300, dmin = 1e300;
    double l_prev = 0.0;
    for (std::size_t k = 0; k < tab.times.size(); ++k) {
        const auto [m, l] = pair(tab.density[k]);
        if (k > 0) integral += 0.5 * (l + l_prev) * (tab.times[k] - tab.times[k - 1]);
        l_prev = l;
        const double d = m - integral;
        dmax = std::max(dmax, d);
        dmin = std::min(dmin, d);
    }
    return tab.times.empty() ? 0.0 : dmax - dmin;
}

// Squared discrete W^{1,2}_0 seminorm of sqrt(rho e^V) - e^{Psi/2}: interior
// differences of f = sqrt(rho e^V) plus half-cell terms against the boundary
// data e^{psi/2}, so any boundary mismatch g costs 2 g^2 / h.
inline double boundary_sobolev_norm(const InteriorMeasure& rho, const PotentialData& pot) {
    const Grid& g = rho.grid;
    require_potential(g, pot);
    const int n = g.n();
    const double h = g.h();
    std::vector<double> f(n);
    for (int c = 0; c < n; ++c) f[c] = std::sqrt(rho.density(c) * std::exp(pot.v_center[c]));
    double s = 0.0;
    for (int c = 0; c + 1 < n; ++c) {
        const double d = (f[c + 1] - f[c]) / h;
        s += d * d * h;
    }
    const double d0 = (f[0] - std::exp(0.5 * pot.psi0)) / (0.5 * h);
    const double d1 = (std::exp(0.5 * pot.psi1) - f[n - 1]) / (0.5 * h);
    s += (d0 * d0 + d1 * d1) * 0.5 * h;
    return s;
}

} // namespace wbf
