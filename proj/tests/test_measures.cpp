#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "test_support.hpp"
#include "wbf/measures.hpp"

using namespace wbf;

namespace {

Errc error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no wbf::Error thrown";
    return Errc::PreconditionViolated;
}

} // namespace

TEST(Grid, SpacingAndCenters) {
    for (int n : {1, 2, 3, 7, 64, 1000}) {
        const Grid g(n);
        EXPECT_NEAR(g.h() * n, 1.0, 1e-15);
        const auto x = g.centers();
        ASSERT_EQ(static_cast<int>(x.size()), n);
        for (int c = 0; c < n; ++c) {
            EXPECT_GT(x[c], 0.0);
            EXPECT_LT(x[c], 1.0);
            if (c) {
                EXPECT_GT(x[c], x[c - 1]);
            }
        }
        const auto s = g.support_nodes();
        ASSERT_EQ(static_cast<int>(s.size()), n + 2);
        EXPECT_EQ(s.front(), 0.0);
        EXPECT_EQ(s.back(), 1.0);
        EXPECT_TRUE(g.is_boundary_node(0) && g.is_boundary_node(n + 1) && !g.is_boundary_node(1));
    }
    EXPECT_EQ(error_of([] { Grid g(0); }), Errc::PreconditionViolated);
}

TEST(Grid, CentersAreMidpoints) {
    const Grid g(4);
    EXPECT_DOUBLE_EQ(g.center(0), 0.125);
    EXPECT_DOUBLE_EQ(g.center(3), 0.875);
}

TEST(MakeMeasure, ZeroMeasure) {
    const auto mu = make_measure(Grid(4), {0, 0, 0, 0}, 0.0, 0.0);
    EXPECT_EQ(mu.interior_total(), 0.0);
    EXPECT_EQ(mu.b0, 0.0);
    EXPECT_EQ(mu.b1, 0.0);
}

TEST(MakeMeasure, AtomMinusBoundaryAtom) {
    const auto mu = make_measure(Grid(2), {1, 0}, -1.0, 0.0);
    EXPECT_EQ(mu.at_node(1), 1.0);
    EXPECT_EQ(mu.at_node(0), -1.0);
}

TEST(MakeMeasure, Rejections) {
    EXPECT_EQ(error_of([] { make_measure(Grid(2), {1, 0}, 0.0, 0.0); }), Errc::MassImbalance);
    EXPECT_EQ(error_of([] { make_measure(Grid(2), {-0.1, 0.1}, 0.0, 0.0); }), Errc::NegativeInteriorMass);
    EXPECT_EQ(error_of([] { make_measure(Grid(2), {0.1}, -0.1, 0.0); }), Errc::PreconditionViolated);
    EXPECT_EQ(error_of([] {
                  make_measure(Grid(2), {0, 0}, std::numeric_limits<double>::infinity(),
                               -std::numeric_limits<double>::infinity());
              }),
              Errc::MassImbalance);
    // within the 1e-12 balance tolerance
    EXPECT_NO_THROW(make_measure(Grid(2), {0.5, 0.5}, -1.0 + 5e-13, 0.0));
}

TEST(MakeMeasure, RandomValidInputsSatisfyInvariants) {
    std::mt19937_64 rng(0);
    for (int k = 0; k < 200; ++k) {
        const Grid g(1 + k % 40);
        const auto mu = oracle::random_measure(g, rng);
        double s = mu.b0 + mu.b1;
        for (double m : mu.interior) {
            EXPECT_GE(m, 0.0);
            s += m;
        }
        EXPECT_LE(std::abs(s), kMassBalanceTol);
    }
}

TEST(SampleDensity, Examples) {
    const auto u = sample_density(Grid(4), [](double) { return 1.0; });
    for (double m : u.mass) EXPECT_DOUBLE_EQ(m, 0.25);
    const auto r = sample_density(Grid(2), [](double x) { return 2 * x; });
    EXPECT_DOUBLE_EQ(r.mass[0], 0.25);
    EXPECT_DOUBLE_EQ(r.mass[1], 0.75);
    EXPECT_EQ(error_of([] { sample_density(Grid(3), [](double) { return -1.0; }); }), Errc::NegativeDensity);
    EXPECT_DOUBLE_EQ(r.density(1), 1.5);
}

TEST(Serialization, RoundTripIsBitExact) {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 50; ++k) {
        const Grid g(1 + k);
        auto mu = oracle::random_measure(g, rng);
        if (k == 0) mu = make_measure(Grid(1), {1.0 / 3.0}, -1.0 / 3.0, 0.0);
        if (k == 1) mu = SignedMeasure{Grid(2), {1e-300, 5e-324}, -1e-300, 0.0};
        std::stringstream ss;
        write_measure(mu, ss);
        EXPECT_EQ(read_measure(ss), mu);
    }
}

TEST(Serialization, FileRoundTrip) {
    const auto mu = make_measure(Grid(2), {1, 0}, -1.0, 0.0);
    const std::string p = ::testing::TempDir() + "/wbf_measure_roundtrip.csv";
    write_measure(mu, p);
    EXPECT_EQ(read_measure(p), mu);
    EXPECT_EQ(error_of([] { read_measure(std::string("/nonexistent/dir/x.csv")); }), Errc::ParseError);
}

TEST(Serialization, Format) {
    std::stringstream ss;
    write_measure(make_measure(Grid(2), {0.25, 0.5}, -0.75, 0.0), ss);
    EXPECT_EQ(ss.str(), "n=2\nb0=-0.75\nb1=0\n1,0.25\n2,0.5\n");
}

TEST(Serialization, ParseErrors) {
    auto parse = [](const std::string& text) {
        std::stringstream ss(text);
        return read_measure(ss);
    };
    auto message = [&](const std::string& text) {
        try {
            parse(text);
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::ParseError);
            return std::string(e.what());
        }
        ADD_FAILURE() << "accepted: " << text;
        return std::string();
    };
    // header says 4 cells, only 3 rows
    EXPECT_NE(message("n=4\nb0=-0.3\nb1=0\n1,0.1\n2,0.1\n3,0.1\n").find("cell row"), std::string::npos);
    // b0 row missing
    EXPECT_NE(message("n=1\nb1=-1\n1,1\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("n=2\nb0=0\nb1=0\n1,0\n3,0\n").find("line 5"), std::string::npos);
    message("n=1\nb0=x\nb1=0\n1,0\n");
    message("n=1\nb0=0\nb1=0\n1,0\n1,0\n");
    message("n=0\nb0=0\nb1=0\n");
    // a well-formed file that violates the mass balance
    try {
        parse("n=1\nb0=0\nb1=0\n1,1\n");
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::MassImbalance);
    }
}

TEST(RestrictInterior, Examples) {
    EXPECT_EQ(restrict_interior(make_measure(Grid(3), {0, 0, 0}, 0, 0)).mass, (std::vector<double>{0, 0, 0}));
    EXPECT_EQ(restrict_interior(make_measure(Grid(2), {1, 0}, -1, 0)).mass, (std::vector<double>{1, 0}));
    EXPECT_EQ(restrict_interior(make_measure(Grid(2), {0.2, 0.3}, -0.5, 0)).mass, (std::vector<double>{0.2, 0.3}));
}

TEST(Potential, SamplingAndConstants) {
    const Grid g(4);
    const auto p = sample_potential(g, [](double x) { return 3 * x; }, 0.5, -0.25);
    EXPECT_EQ(p.n(), 4);
    ASSERT_EQ(p.v_face.size(), 5u);
    EXPECT_DOUBLE_EQ(p.v0(), 0.0);
    EXPECT_DOUBLE_EQ(p.v1(), 3.0);
    EXPECT_DOUBLE_EQ(p.v_center[1], 3 * 0.375);
    EXPECT_DOUBLE_EQ(p.lip_psi(), 0.75);
    EXPECT_DOUBLE_EQ(p.theta0(), std::exp(0.5));
    EXPECT_DOUBLE_EQ(p.psi_at(0.5), 0.125);
    EXPECT_EQ(error_of([&] { sample_potential(g, [](double) { return std::nan(""); }, 0, 0); }),
              Errc::NonFiniteState);
    EXPECT_EQ(error_of([&] { require_potential(Grid(5), p); }), Errc::GridMismatch);
}

TEST(Potential, BoundaryEquilibrium) {
    const Grid g(8);
    const auto p = sample_potential(g, [](double x) { return x * x; }, 0.3, 0.3);
    const auto r = boundary_equilibrium(g, p);
    for (int c = 0; c < 8; ++c) EXPECT_NEAR(r.density(c), std::exp(0.3 - g.center(c) * g.center(c)), 1e-14);
}

TEST(BalancedMeasure, SplitsCompensatingMass) {
    const InteriorMeasure r{Grid(2), {0.25, 0.5}};
    const auto mu = balanced_measure(r, 0.2);
    EXPECT_DOUBLE_EQ(mu.b0, -0.15);
    EXPECT_DOUBLE_EQ(mu.b1, -0.6);
}
