#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "test_support.hpp"
#include "wbf/diagnostics.hpp"

using namespace wbf;

namespace {

PotentialData flat(const Grid& g, double psi0 = 0.0, double psi1 = 0.0) {
    return sample_potential(g, [](double) { return 0.0; }, psi0, psi1);
}

PotentialData doublewell(const Grid& g, double psi0, double psi1) {
    return sample_potential(
        g, [](double x) { return 64 * (x - 0.25) * (x - 0.25) * (x - 0.75) * (x - 0.75); }, psi0, psi1);
}

SignedMeasure sine_start(const Grid& g) {
    return balanced_measure(sample_density(g, [](double x) { return 1.0 + std::sin(M_PI * x); }));
}

} // namespace

TEST(Slope, EquilibriumHasZeroSlope) {
    const Grid g(64);
    for (double psi : {0.0, 0.5}) {
        const auto pot = doublewell(g, psi, psi);
        const auto s = slope(balanced_measure(boundary_equilibrium(g, pot)), pot);
        EXPECT_TRUE(s.finite());
        EXPECT_NEAR(s.value, 0.0, 1e-20);
    }
}

TEST(Slope, MatchedQuadraticProfile) {
    for (int n : {64, 256, 1024}) {
        const Grid g(n);
        const auto pot = flat(g, 0.0, 2 * std::log(2.0));
        const auto rho = sample_density(g, [](double x) { return (1 + x) * (1 + x); });
        const auto s = slope(balanced_measure(rho), pot);
        ASSERT_TRUE(s.finite());
        EXPECT_NEAR(s.value, 4.0, 4.0 / n) << n;
    }
}

TEST(Slope, WeightedFisherInformation) {
    // rho e^V = (1+x)^2 with V = x: slope^2 = 4 int e^{-x} dx = 4 (1 - 1/e)
    const Grid g(512);
    const auto pot = sample_potential(g, [](double x) { return x; }, 0.0, 2 * std::log(2.0));
    const auto rho = sample_density(g, [](double x) { return (1 + x) * (1 + x) * std::exp(-x); });
    EXPECT_NEAR(slope(balanced_measure(rho), pot).value, 4 * (1 - std::exp(-1.0)), 1e-4);
}

TEST(Slope, BoundaryMismatchIsInfinite) {
    // e^{Psi(0) - V(0)} = e while rho = 1: the violation grows like h^{-1/2}
    double prev = 0.0;
    for (int n : {64, 256, 1024}) {
        const Grid g(n);
        const auto pot = flat(g, 1.0, 0.0);
        const auto one = balanced_measure(sample_density(g, [](double) { return 1.0; }));
        const auto s = slope(one, pot);
        EXPECT_NEAR(s.boundary_violation, (std::exp(0.5) - 1) * std::sqrt(n), 1e-9);
        EXPECT_GT(s.boundary_violation, prev);
        prev = s.boundary_violation;
        EXPECT_EQ(s.finite(), n < 256) << n;
    }
    EXPECT_EQ(slope(balanced_measure(sample_density(Grid(64), [](double) { return 1.0; })), flat(Grid(64), 1.0, 0.0),
                    1.0)
                  .value,
              std::numeric_limits<double>::infinity());
}

TEST(Slope, InfiniteEnergyIsRejected) {
    const Grid g(4);
    const double inf = std::numeric_limits<double>::infinity();
    const SignedMeasure mu{g, {0.25, 0.25, 0.25, 0.25}, inf, -inf};
    try {
        slope(mu, flat(g, 1.0, 0.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::InfiniteEnergy);
    }
}

TEST(Wb2Slope, Dichotomy) {
    const Grid g(256);
    const auto dw = doublewell(g, 0.0, 0.0);
    EXPECT_NEAR(wb2_slope(sample_density(g, [&](double x) { return std::exp(-64 * std::pow((x - 0.25) * (x - 0.75), 2)); }), dw)
                    .value,
                0.0, 1e-20);
    EXPECT_EQ(wb2_slope(sample_density(g, [](double) { return 1.0; }), flat(g)).value, 0.0);
    const auto sq = sample_density(g, [](double x) { return (1 + x) * (1 + x); });
    EXPECT_FALSE(wb2_slope(sq, flat(g)).finite());
    // the W~b2 slope with matching Psi is finite on the same density
    EXPECT_TRUE(slope(balanced_measure(sq), flat(g, 0.0, 2 * std::log(2.0))).finite());
}

TEST(Edi, StationaryTrajectory) {
    const Grid g(32);
    const auto pot = doublewell(g, 0.3, 0.3);
    const JkoConfig cfg{0.01};
    const auto tr = run_scheme(balanced_measure(boundary_equilibrium(g, pot)), pot, cfg, 0.1);
    const auto rep = edi_report(tr, pot);
    ASSERT_EQ(rep.records.size(), 10u);
    EXPECT_TRUE(rep.finite);
    for (const auto& r : rep.records) EXPECT_LE(std::abs(r.residual), cfg.solver_tol);
    EXPECT_LE(rep.mean_positive, cfg.solver_tol);
}

TEST(Edi, OneStepMinimalityAndSign) {
    const Grid g(64);
    const auto pot = flat(g);
    const JkoConfig cfg{4e-3};
    const auto tr = run_scheme(sine_start(g), pot, cfg, 0.04);
    const auto rep = edi_report(tr, pot);
    for (std::size_t k = 0; k < rep.records.size(); ++k) {
        const auto& r = rep.records[k];
        EXPECT_LE(r.dphi + 0.5 * r.metric2, cfg.solver_tol);  // H(n+1) + cost2 / 2 tau <= H(n)
        EXPECT_NEAR(r.metric2, tr.steps[k].cost2 / cfg.tau, 1e-15);
        EXPECT_GT(r.slope2, 0.0);
        EXPECT_NEAR(r.t, (k + 1) * cfg.tau, 1e-15);
    }
    EXPECT_TRUE(rep.finite);
}

TEST(Edi, NodeMetricPaysRebinningEveryStep) {
    const Grid g(32);
    const auto pot = flat(g);
    // stationary: both speeds vanish
    const auto eq = run_scheme(balanced_measure(boundary_equilibrium(g, pot)), pot, JkoConfig{0.01}, 0.05);
    for (const auto& r : edi_report(eq, pot, EdiMetric::wb2tilde_lp).records) EXPECT_LE(std::abs(r.metric2), 1e-12);
    // moving: cell atoms pay about h per unit of mass crossing a face, so the node speed
    // does not vanish with tau while the step speed does
    double lp_prev = 0.0, step_prev = std::numeric_limits<double>::infinity();
    for (double tau : {4e-3, 2e-3}) {
        const auto tr = run_scheme(sine_start(g), pot, JkoConfig{tau}, 0.02);
        const auto lp = edi_report(tr, pot, EdiMetric::wb2tilde_lp), st = edi_report(tr, pot);
        EXPECT_GT(lp.records.back().metric2, st.records.back().metric2);
        EXPECT_LT(st.records.back().metric2, step_prev);
        EXPECT_GT(lp.mean_positive, lp_prev);
        lp_prev = lp.mean_positive;
        step_prev = st.records.back().metric2;
    }
}

TEST(Edi, JkoDensitiesSatisfyWeakFormAsTauShrinks) {
    const Grid g(64);
    const auto pot = doublewell(g, 0.0, 0.4);
    std::vector<double> phi(64);
    for (int c = 1; c < 63; ++c) phi[c] = std::pow(std::sin(M_PI * g.center(c)), 4);
    double prev = std::numeric_limits<double>::infinity();
    for (double tau : {8e-3, 4e-3, 2e-3}) {
        const auto tr = run_scheme(sine_start(g), pot, JkoConfig{tau}, 0.08);
        const double r = weak_form_residual(to_density_table(tr), pot, phi);
        EXPECT_LT(r, prev) << tau;
        prev = r;
    }
}

TEST(Geodesic, EndpointsAndConstantSpeed) {
    std::mt19937_64 rng(40);
    for (int k = 0; k < 8; ++k) {
        const Grid g(6 + k % 3);
        const auto mu0 = oracle::random_measure(g, rng), mu1 = oracle::random_measure(g, rng);
        const auto w = wb2tilde(mu0, mu1);
        const double d = w.cost, budget = 2 * g.h() * w.plan->total_mass();
        const auto start = geodesic_interpolate(mu0, mu1, 0.0);
        EXPECT_NEAR(start.b0, mu0.b0, 1e-14);
        EXPECT_NEAR(start.b1, mu0.b1, 1e-14);
        for (int c = 0; c < g.n(); ++c) EXPECT_NEAR(start.interior[c], mu0.interior[c], 1e-14);
        EXPECT_LE(wb2tilde(geodesic_interpolate(mu0, mu1, 1.0), mu1).cost, 1e-9);
        const std::vector<double> ts{0.0, 0.25, 0.5, 1.0};
        std::vector<SignedMeasure> pts;
        for (double t : ts) {
            pts.push_back(geodesic_interpolate(mu0, mu1, t));
            double tot = pts.back().b0 + pts.back().b1;
            for (double m : pts.back().interior) {
                EXPECT_GE(m, 0.0);
                tot += m;
            }
            EXPECT_NEAR(tot, 0.0, 1e-12);
        }
        for (std::size_t i = 0; i < ts.size(); ++i)
            for (std::size_t j = i + 1; j < ts.size(); ++j)
                EXPECT_LE(std::abs(wb2tilde(pts[i], pts[j]).cost - (ts[j] - ts[i]) * d), budget) << k;
    }
    const Grid g(4);
    EXPECT_THROW(geodesic_interpolate(sine_start(g), sine_start(g), 1.5), Error);
}

TEST(Notconv, EnergyAlongGeodesicIsMinusLogS) {
    const Grid g(256);
    const auto pot = flat(g);
    for (double s : {0.5, 0.25, 0.125}) {
        const auto d = notconv_defect(g, pot, s);
        EXPECT_NEAR(d.H0, 1.0, 1e-15);
        EXPECT_NEAR(d.H1, 0.0, 1e-12);
        EXPECT_NEAR(d.Hs, -std::log(s), 0.05) << s;
        EXPECT_GT(d.defect, 0.0);
    }
    // at the finest resolved time the defect grows with the grid
    double prev = 0.0;
    for (int n : {32, 64, 128}) {
        const double defect = notconv_defect(Grid(n), flat(Grid(n)), 4.0 / n).defect;
        EXPECT_GT(defect, prev + 0.3) << n;
        prev = defect;
    }
}

TEST(Informloss, QuarterCircleChain) {
    EXPECT_NEAR(informloss_chain(quarter_circle(1)), 2.0, 1e-15);
    for (int n : {2, 4, 8, 16, 32, 64}) {
        const double c = informloss_chain(quarter_circle(n));
        EXPECT_LE(c, M_PI * M_PI / 4 / n);
        EXPECT_NEAR(informloss_chain(quarter_circle(2 * n)) / c, 0.5, 0.05);
        // n equal chords of angle pi/2n
        EXPECT_NEAR(c, n * 4 * std::pow(std::sin(M_PI / (4 * n)), 2), 1e-13);
    }
    EXPECT_THROW(quarter_circle(0), Error);
    EXPECT_THROW(informloss_chain({{0.0, 0.0}}), Error);
}

TEST(Noncomplete, BoundedSumsUnboundedMass) {
    const Grid g(256);
    const auto rows = noncomplete_demo(6, g);
    ASSERT_EQ(rows.size(), 5u);
    for (const auto& r : rows) {
        EXPECT_GE(r.interior_mass, 0.9 * r.n * std::log(2.0));
        EXPECT_NEAR(r.interior_mass, r.n * std::log(2.0), 0.05);
        EXPECT_LE(r.distance, std::sqrt(3.0 / 8.0) * std::ldexp(1.0, -r.n) + 2 * g.h());
        EXPECT_LE(r.partial_sum, std::sqrt(3.0 / 8.0) + 0.05);
    }
    try {
        noncomplete_demo(6, Grid(16));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::GridTooCoarse);
    }
}

TEST(Noncomplete, SublevelsAreComplete) {
    // a Cauchy sequence with bounded energy: perturbations of a fixed measure shrinking geometrically
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Grid g(12);
    const auto pot = doublewell(g, 0.0, 0.4);
    const auto limit = sine_start(g);
    std::vector<SignedMeasure> seq;
    double M = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 12; ++k) {
        auto m = limit;
        const double eps = std::ldexp(1.0, -k);
        double added = 0.0;
        for (double& x : m.interior) {
            const double dx = eps * u(rng) * x;
            x += dx;
            added += dx;
        }
        m.b0 -= added;
        seq.push_back(m);
        M = std::max(M, functional_H(m, pot).total_H);
    }
    for (std::size_t k = 1; k + 1 < seq.size(); ++k) {
        EXPECT_LE(wb2tilde(seq[k], seq[k + 1]).cost, 2 * std::sqrt(std::ldexp(1.0, -static_cast<int>(k))));
    }
    EXPECT_LT(wb2tilde(seq.back(), limit).cost, 0.02);
    EXPECT_LT(wb2tilde(seq.back(), limit).cost, wb2tilde(seq[3], limit).cost);
    EXPECT_LE(functional_H(limit, pot).total_H, M + 1e-12);
}

TEST(Slope, LowerSemicontinuityProxy) {
    const Grid g(64);
    const auto pot = flat(g, 0.0, 0.0);
    const auto base = sample_density(g, [](double x) { return 1.0 + 0.5 * std::sin(M_PI * x); });
    const double s0 = slope(balanced_measure(base), pot).value;
    ASSERT_TRUE(std::isfinite(s0));
    // oscillating approximations: they converge in W~b2 and the slope cannot jump down
    double prev_d = std::numeric_limits<double>::infinity();
    for (int k : {2, 4, 8}) {
        InteriorMeasure r = base;
        for (int c = 0; c < g.n(); ++c) r.mass[c] *= 1.0 + std::sin(2 * M_PI * k * g.center(c)) / std::sqrt(k * 1.0);
        const auto mu = balanced_measure(r);
        const double d = wb2tilde(mu, balanced_measure(base)).cost;
        EXPECT_LT(d, prev_d);
        prev_d = d;
        EXPECT_GE(slope(mu, pot).value, s0);
    }
    // convex combinations with the equilibrium approach from below; the gap closes at rate 1/n
    double prev_gap = std::numeric_limits<double>::infinity();
    for (int n : {4, 16, 64}) {
        InteriorMeasure r = base;
        for (int c = 0; c < g.n(); ++c) r.mass[c] = (1 - 1.0 / n) * base.mass[c] + g.h() / n;
        const double gap = s0 - slope(balanced_measure(r), pot).value;
        EXPECT_LT(gap, prev_gap);
        EXPECT_LE(gap, 3 * s0 / n);
        prev_gap = gap;
    }
}

TEST(Contractivity, StationaryAndHeat) {
    const Grid g(32);
    {
        const auto pot = doublewell(g, 0.2, 0.2);
        const auto tr = run_scheme(balanced_measure(boundary_equilibrium(g, pot)), pot, JkoConfig{0.01}, 0.05);
        const auto rep = contractivity_report(tr, pot, {1, 2, 4});
        ASSERT_EQ(rep.rows.size(), 3 * 6u);
        for (const auto& r : rep.rows) EXPECT_NEAR(r.decrement, 0.0, 1e-8);
        EXPECT_FALSE(rep.increase_flagged);
    }
    const auto pot = flat(g);
    const JkoConfig cfg{4e-3};
    const auto tr = run_scheme(sine_start(g), pot, cfg, 0.08);
    const auto rep = contractivity_report(tr, pot, {1, 2, 4});
    EXPECT_LE(rep.max_increase, cfg.solver_tol);
    EXPECT_FALSE(rep.increase_flagged);
    const auto b = trajectory_bounds(tr, pot);
    for (const auto& r : rep.rows)
        if (r.q == 1.0) {
            EXPECT_LE(r.norm, b.mass_bound + 1e-8);
        }
    EXPECT_LE(b.max_interior_mass, b.mass_bound + 1e-8);
    double s = 0.0;
    for (const auto& st : tr.steps) s += st.cost2;
    EXPECT_DOUBLE_EQ(b.sum_cost2, s);
    EXPECT_GT(b.tv_constant, 0.0);
    EXPECT_GT(b.sobolev_average, 0.0);
}

TEST(Bounds, SumOfCostsScalesWithTau) {
    const Grid g(48);
    const auto pot = doublewell(g, 0.0, 0.4);
    std::vector<double> C;
    for (double tau : {8e-3, 4e-3, 2e-3}) C.push_back(trajectory_bounds(run_scheme(sine_start(g), pot, JkoConfig{tau}, 0.1), pot).sum_cost2_constant);
    for (double c : C) EXPECT_GT(c, 0.0);
    EXPECT_LE(C[1] / C[0], 2.0);
    EXPECT_GE(C[1] / C[0], 0.5);
    EXPECT_LE(C[2] / C[1], 2.0);
    EXPECT_GE(C[2] / C[1], 0.5);
}

TEST(Slope, BoundedByStepSpeed) {
    // slope^2(mu_{n+1}) <= (T(mu_n, mu_{n+1}) / tau)^2 (1 + O(h))
    const Grid g(64);
    const auto pot = flat(g);
    const JkoConfig cfg{4e-3};
    const auto tr = run_scheme(sine_start(g), pot, cfg, 0.02);
    for (std::size_t k = 0; k < tr.steps.size(); ++k) {
        const double s2 = slope(tr.states[k + 1], pot).value;
        EXPECT_LE(s2 * cfg.tau * cfg.tau / tr.steps[k].cost2, 1.0 + 5 * g.h()) << k;
        if (k < 2) {
            const double t2 = t_cost(tr.states[k + 1], tr.states[k]).cost2;
            EXPECT_LE(s2 * cfg.tau * cfg.tau / t2, 1.0 + 5 * g.h()) << k;
        }
    }
}
