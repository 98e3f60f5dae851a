#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "wbf/error.hpp"

namespace wbf {

inline constexpr double kMassBalanceTol = 1e-12;

// Uniform partition of [0,1]. Cells are 0-based in code; support nodes are
// numbered 0..n+1 where 0 and n+1 are the boundary points.
class Grid {
public:
    Grid() = default;
    explicit Grid(int n_cells) : n_(n_cells), h_(1.0 / n_cells) {
        if (n_cells <= 0) throw Error(Errc::PreconditionViolated, "grid needs n_cells > 0");
    }

    int n() const { return n_; }
    double h() const { return h_; }
    double center(int c) const { return (c + 0.5) * h_; }
    int n_nodes() const { return n_ + 2; }
    double node(int k) const {
        if (k == 0) return 0.0;
        if (k == n_ + 1) return 1.0;
        return center(k - 1);
    }
    static bool is_boundary_node(int k, int n) { return k == 0 || k == n + 1; }
    bool is_boundary_node(int k) const { return is_boundary_node(k, n_); }

    std::vector<double> centers() const {
        std::vector<double> x(n_);
        for (int c = 0; c < n_; ++c) x[c] = center(c);
        return x;
    }
    std::vector<double> support_nodes() const {
        std::vector<double> x(n_nodes());
        for (int k = 0; k < n_nodes(); ++k) x[k] = node(k);
        return x;
    }

    friend bool operator==(const Grid& a, const Grid& b) { return a.n_ == b.n_; }

private:
    int n_ = 0;
    double h_ = 0.0;
};

inline void require_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b))
        throw Error(Errc::GridMismatch,
                    "grids differ (" + std::to_string(a.n()) + " vs " + std::to_string(b.n()) + ")");
}

struct InteriorMeasure {
    Grid grid;
    std::vector<double> mass;

    double total() const {
        double s = 0.0;
        for (double m : mass) s += m;
        return s;
    }
    double density(int c) const { return mass[c] / grid.h(); }
};

// Element of S: nonnegative cell masses plus signed atoms at 0 and 1, total zero.
struct SignedMeasure {
    Grid grid;
    std::vector<double> interior;
    double b0 = 0.0;
    double b1 = 0.0;

    double interior_total() const {
        double s = 0.0;
        for (double m : interior) s += m;
        return s;
    }
    // value at support node k (0..n+1)
    double at_node(int k) const {
        if (k == 0) return b0;
        if (k == grid.n() + 1) return b1;
        return interior[k - 1];
    }
    std::vector<double> node_values() const {
        std::vector<double> v(grid.n_nodes());
        for (int k = 0; k < grid.n_nodes(); ++k) v[k] = at_node(k);
        return v;
    }
    friend bool operator==(const SignedMeasure& a, const SignedMeasure& b) {
        return a.grid == b.grid && a.interior == b.interior && a.b0 == b.b0 && a.b1 == b.b1;
    }
};

inline SignedMeasure make_measure(const Grid& grid, std::vector<double> interior, double b0, double b1) {
    if (static_cast<int>(interior.size()) != grid.n())
        throw Error(Errc::PreconditionViolated, "interior length " + std::to_string(interior.size()) +
                                                    " != n_cells " + std::to_string(grid.n()));
    double s = 0.0;
    for (std::size_t i = 0; i < interior.size(); ++i) {
        if (!(interior[i] >= 0.0))
            throw Error(Errc::NegativeInteriorMass, "cell " + std::to_string(i + 1) + " has mass " +
                                                        std::to_string(interior[i]));
        s += interior[i];
    }
    if (!std::isfinite(b0) || !std::isfinite(b1))
        throw Error(Errc::MassImbalance, "non-finite boundary atom");
    const double total = s + b0 + b1;
    if (std::abs(total) > kMassBalanceTol)
        throw Error(Errc::MassImbalance, "total mass " + std::to_string(total) + " is not zero");
    return SignedMeasure{grid, std::move(interior), b0, b1};
}

// Completes an interior measure to an element of S by splitting the
// compensating mass between the two boundary points.
inline SignedMeasure balanced_measure(const InteriorMeasure& rho, double weight0 = 0.5) {
    const double m = rho.total();
    const double b0 = -weight0 * m;
    const double b1 = -m - b0;
    return make_measure(rho.grid, rho.mass, b0, b1);
}

inline InteriorMeasure restrict_interior(const SignedMeasure& mu) { return {mu.grid, mu.interior}; }

inline InteriorMeasure sample_density(const Grid& grid, const std::function<double(double)>& f) {
    InteriorMeasure out{grid, std::vector<double>(grid.n())};
    for (int c = 0; c < grid.n(); ++c) {
        const double v = f(grid.center(c));
        if (!(v >= 0.0))
            throw Error(Errc::NegativeDensity, "density " + std::to_string(v) + " at x=" +
                                                   std::to_string(grid.center(c)));
        out.mass[c] = v * grid.h();
    }
    return out;
}

// V sampled at centers and at the faces k*h (k = 0..n, so the two boundary
// points are the first and last face); Psi given by its boundary values.
struct PotentialData {
    std::vector<double> v_center;
    std::vector<double> v_face;
    double psi0 = 0.0;
    double psi1 = 0.0;

    int n() const { return static_cast<int>(v_center.size()); }
    double lip_psi() const { return std::abs(psi1 - psi0); }
    double theta0() const { return std::max(std::exp(psi0), std::exp(psi1)); }
    double v0() const { return v_face.front(); }
    double v1() const { return v_face.back(); }
    // linear extension of Psi to [0,1]
    double psi_at(double x) const { return psi0 + (psi1 - psi0) * x; }
    double psi_node(int k) const { return k == 0 ? psi0 : psi1; }
};

inline PotentialData sample_potential(const Grid& grid, const std::function<double(double)>& V,
                                      double psi0, double psi1) {
    PotentialData p;
    p.v_center.resize(grid.n());
    p.v_face.resize(grid.n() + 1);
    for (int c = 0; c < grid.n(); ++c) p.v_center[c] = V(grid.center(c));
    for (int k = 0; k <= grid.n(); ++k) p.v_face[k] = V(k * grid.h());
    p.psi0 = psi0;
    p.psi1 = psi1;
    for (double v : p.v_center)
        if (!std::isfinite(v)) throw Error(Errc::NonFiniteState, "potential not finite");
    for (double v : p.v_face)
        if (!std::isfinite(v)) throw Error(Errc::NonFiniteState, "potential not finite");
    if (!std::isfinite(psi0) || !std::isfinite(psi1))
        throw Error(Errc::NonFiniteState, "boundary datum not finite");
    return p;
}

inline void require_potential(const Grid& grid, const PotentialData& pot) {
    if (pot.n() != grid.n() || static_cast<int>(pot.v_face.size()) != grid.n() + 1)
        throw Error(Errc::GridMismatch, "potential sampled on a different grid");
}

// rho = e^{Psi - V} with Psi extended linearly; stationary when psi0 == psi1
inline InteriorMeasure boundary_equilibrium(const Grid& grid, const PotentialData& pot) {
    InteriorMeasure out{grid, std::vector<double>(grid.n())};
    for (int c = 0; c < grid.n(); ++c)
        out.mass[c] = std::exp(pot.psi_at(grid.center(c)) - pot.v_center[c]) * grid.h();
    return out;
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s, int line) {
    const char* b = s.c_str();
    char* e = nullptr;
    const double v = std::strtod(b, &e);
    while (e && (*e == ' ' || *e == '\t' || *e == '\r')) ++e;
    if (e == b || (e && *e != '\0'))
        throw Error(Errc::ParseError, "line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

inline std::string expect_key(const std::string& text, const std::string& key, int line) {
    const std::string prefix = key + "=";
    if (text.rfind(prefix, 0) != 0)
        throw Error(Errc::ParseError, "line " + std::to_string(line) + ": expected '" + prefix + "'");
    return text.substr(prefix.size());
}

} // namespace detail

inline void write_measure(const SignedMeasure& mu, std::ostream& os) {
    os << "n=" << mu.grid.n() << '\n';
    os << "b0=" << detail::fmt_double(mu.b0) << '\n';
    os << "b1=" << detail::fmt_double(mu.b1) << '\n';
    for (int c = 0; c < mu.grid.n(); ++c) os << (c + 1) << ',' << detail::fmt_double(mu.interior[c]) << '\n';
}

inline void write_measure(const SignedMeasure& mu, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error(Errc::ParseError, "cannot open '" + path + "' for writing");
    write_measure(mu, os);
}

inline SignedMeasure read_measure(std::istream& is) {
    std::string line;
    int ln = 0;
    auto next = [&](const char* what) {
        while (std::getline(is, line)) {
            ++ln;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return;
        }
        throw Error(Errc::ParseError, "line " + std::to_string(ln + 1) + ": missing " + what);
    };
    next("n= header");
    const std::string ns = detail::expect_key(line, "n", ln);
    const double nd = detail::parse_double(ns, ln);
    if (nd < 1 || nd != std::floor(nd)) throw Error(Errc::ParseError, "line " + std::to_string(ln) + ": bad n");
    const int n = static_cast<int>(nd);
    next("b0= row");
    const double b0 = detail::parse_double(detail::expect_key(line, "b0", ln), ln);
    next("b1= row");
    const double b1 = detail::parse_double(detail::expect_key(line, "b1", ln), ln);
    std::vector<double> mass(n);
    for (int c = 0; c < n; ++c) {
        next("cell row");
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw Error(Errc::ParseError, "line " + std::to_string(ln) + ": expected '<i>,<mass>'");
        const double idx = detail::parse_double(line.substr(0, comma), ln);
        if (idx != c + 1)
            throw Error(Errc::ParseError, "line " + std::to_string(ln) + ": expected cell index " +
                                              std::to_string(c + 1));
        mass[c] = detail::parse_double(line.substr(comma + 1), ln);
    }
    while (std::getline(is, line)) {
        ++ln;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) throw Error(Errc::ParseError, "line " + std::to_string(ln) + ": trailing data");
    }
    return make_measure(Grid(n), std::move(mass), b0, b1);
}

inline SignedMeasure read_measure(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(Errc::ParseError, "cannot open '" + path + "'");
    return read_measure(is);
}

} // namespace wbf
