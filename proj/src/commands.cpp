#include "wbf/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "wbf/wbf.hpp"

namespace wbf::cli {

namespace fs = std::filesystem;
using detail::fmt_double;

int exit_code_for(Errc code) {
    switch (code) {
    case Errc::SolverDiverged:
    case Errc::NonFiniteState:
    case Errc::InfeasibleScheme: return kDiverged;
    default: return kConfigError;
    }
}

bool CheckTable::all_pass() const {
    return std::all_of(rows_.begin(), rows_.end(), [](const CheckRow& r) { return r.pass; });
}

void CheckTable::write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw Error(Errc::ParseError, "cannot open '" + path + "' for writing");
    os << "check,residual,tolerance,pass\n";
    for (const auto& r : rows_)
        os << r.name << ',' << fmt_double(r.residual) << ',' << fmt_double(r.tolerance) << ','
           << (r.pass ? "true" : "false") << '\n';
}

void CheckTable::print(std::ostream& os) const {
    char buf[256];
    for (const auto& r : rows_) {
        std::snprintf(buf, sizeof buf, "%s %-34s residual=%-12.6g tolerance=%.6g\n", r.pass ? "PASS" : "FAIL",
                      r.name.c_str(), r.residual, r.tolerance);
        os << buf;
    }
}

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out);
    return (fs::path(cfg.out) / name).string();
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
    const std::string p = out_path(cfg, name);
    std::ofstream os(p);
    if (!os) throw Error(Errc::ParseError, "cannot open '" + p + "' for writing");
    return os;
}

int finish(const CheckTable& t, const RunConfig& cfg, const std::string& csv, std::ostream& log) {
    t.write_csv(out_path(cfg, csv));
    t.print(log);
    log << (t.all_pass() ? "all checks passed" : "some checks FAILED") << '\n';
    return t.all_pass() ? kOk : kCheckFailed;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double max_abs_diff(const SignedMeasure& a, const SignedMeasure& b) {
    double d = std::max(std::abs(a.b0 - b.b0), std::abs(a.b1 - b.b1));
    for (std::size_t c = 0; c < a.interior.size(); ++c) d = std::max(d, std::abs(a.interior[c] - b.interior[c]));
    return d;
}

// Seeded element of S: cell masses up to 2h, atoms split at random with a signed offset.
SignedMeasure random_measure(const Grid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> m(g.n());
    double s = 0.0;
    for (double& x : m) {
        x = 2.0 * g.h() * u(rng);
        s += x;
    }
    const double b0 = -s * u(rng) + (u(rng) - 0.5);
    return make_measure(g, std::move(m), b0, -s - b0);
}

struct Problem {
    Grid grid;
    PotentialData pot;
    SignedMeasure initial;
};

Problem setup(const RunConfig& cfg) {
    validate(cfg);
    Grid g = make_grid(cfg);
    PotentialData pot = make_potential(cfg, g);
    SignedMeasure mu = make_initial(cfg, g, pot);
    return {g, std::move(pot), std::move(mu)};
}

void write_energy(std::ostream& os, const Trajectory& tr, const PotentialData& pot) {
    os << "step,t,H,entropy_E,boundary_term\n";
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
        const auto e = functional_H(tr.states[k], pot);
        os << k << ',' << fmt_double(tr.times[k]) << ',' << fmt_double(e.total_H) << ',' << fmt_double(e.entropy_E)
           << ',' << fmt_double(e.boundary_term + 0.0) << '\n';
    }
}

// demos -----------------------------------------------------------------

int demo_notri(const RunConfig& cfg, std::ostream& log) {
    // three cells so that x = 1/2 is a support node
    const Grid g(3);
    const SignedMeasure mu1{g, {0.0, 0.0, 0.0}, 1.0, -1.0};
    const SignedMeasure mu2{g, {0.0, 1.0, 0.0}, 0.0, -1.0};
    const SignedMeasure mu3{g, {0.0, 0.0, 0.0}, 0.0, 0.0};
    const auto t12 = t_cost(mu1, mu2), t23 = t_cost(mu2, mu3), t13 = t_cost(mu1, mu3);
    const double w12 = wb2tilde(mu1, mu2).cost, w23 = wb2tilde(mu2, mu3).cost, w13 = wb2tilde(mu1, mu3).cost;
    log << "T(mu1,mu2)=" << fmt_double(t12.cost) << " T(mu2,mu3)=" << fmt_double(t23.cost)
        << " T(mu1,mu3)=" << (t13.infinite() ? "inf" : fmt_double(t13.cost)) << '\n';
    CheckTable t;
    t.at_most("T12_minus_half", std::abs(t12.cost - 0.5), 1e-9);
    t.at_most("T23_minus_half", std::abs(t23.cost - 0.5), 1e-9);
    t.add("T13_infinite", t13.infinite() ? 1.0 : 0.0, 1.0, t13.infinite());
    // expected: the triangle inequality fails for T on this triple
    const double excess = t13.cost - (t12.cost + t23.cost);
    t.add("T_triangle_fails_expected", excess, 0.0, excess > 0.0);
    t.at_most("Wb2tilde_triangle_excess", w13 - (w12 + w23), 1e-9);
    return finish(t, cfg, "demo_notri.csv", log);
}

int demo_notconv(const RunConfig& cfg, std::ostream& log) {
    validate(cfg);
    const int n = cfg.n_cells;
    auto defect_at = [](int cells) {
        const Grid g(cells);
        const auto pot = sample_potential(g, [](double) { return 0.0; }, 0.0, 0.0);
        return notconv_defect(g, pot, 4.0 / cells);
    };
    {
        const Grid g(n);
        const auto pot = sample_potential(g, [](double) { return 0.0; }, 0.0, 0.0);
        auto os = open_out(cfg, "demo_notconv_profile.csv");
        os << "s,H_geodesic,minus_log_s\n";
        for (double s = 0.5; s >= 4.0 / n - 1e-12; s *= 0.5) {
            const auto d = notconv_defect(g, pot, s);
            os << fmt_double(s) << ',' << fmt_double(d.Hs) << ',' << fmt_double(-std::log(s)) << '\n';
        }
    }
    const auto d1 = defect_at(n), d2 = defect_at(2 * n);
    log << "defect(N=" << n << ")=" << fmt_double(d1.defect) << " defect(N=" << 2 * n << ")=" << fmt_double(d2.defect)
        << '\n';
    CheckTable t;
    t.at_least("defect_positive_N", d1.defect, 0.0);
    t.at_least("defect_growth_2N_minus_N", d2.defect - d1.defect, 0.0);
    return finish(t, cfg, "demo_notconv.csv", log);
}

int demo_noncomplete(const RunConfig& cfg, std::ostream& log) {
    validate(cfg);
    if (cfg.n_max < 2 || cfg.n_max > 12) throw Error(Errc::PreconditionViolated, "n_max must lie in [2,12]");
    const Grid g(std::max(cfg.n_cells, 1 << (cfg.n_max + 1)));
    const auto rows = noncomplete_demo(cfg.n_max, g);
    const double c = std::sqrt(3.0 / 8.0);
    auto os = open_out(cfg, "demo_noncomplete_table.csv");
    os << "n,interior_mass,distance,partial_sum\n";
    CheckTable t;
    for (const auto& r : rows) {
        os << r.n << ',' << fmt_double(r.interior_mass) << ',' << fmt_double(r.distance) << ','
           << fmt_double(r.partial_sum) << '\n';
        t.at_most("distance_excess_n" + std::to_string(r.n), r.distance - c * std::ldexp(1.0, -r.n), 2.0 * g.h());
        t.at_least("mass_over_nlog2_n" + std::to_string(r.n), r.interior_mass / (r.n * std::log(2.0)), 0.9);
    }
    t.at_most("partial_sum", rows.back().partial_sum, c + 0.05);
    log << "grid N=" << g.n() << " partial sum " << fmt_double(rows.back().partial_sum) << " (sqrt(3/8) = "
        << fmt_double(c) << ")\n";
    return finish(t, cfg, "demo_noncomplete.csv", log);
}

int demo_informloss(const RunConfig& cfg, std::ostream& log) {
    auto os = open_out(cfg, "demo_informloss_table.csv");
    os << "n,cost,ratio_to_previous,arc_bound\n";
    CheckTable t;
    double prev = 0.0;
    const double arc2 = 0.25 * M_PI * M_PI;
    for (int n = 1; n <= 64; n *= 2) {
        const double c = informloss_chain(quarter_circle(n));
        const double ratio = n > 1 ? c / prev : 0.0;
        os << n << ',' << fmt_double(c) << ',' << fmt_double(ratio) << ',' << fmt_double(arc2 / n) << '\n';
        if (n == 1) t.at_most("chord_n1_minus_2", std::abs(c - 2.0), 1e-12);
        t.at_most("arc_bound_n" + std::to_string(n), c, arc2 / n);
        if (n >= 16 && n <= 64) {
            const std::string name = "ratio_n" + std::to_string(n / 2);
            t.add(name, ratio, 0.05, std::abs(ratio - 0.5) <= 0.05);
        }
        if (n == 64) t.at_most("cost_n64", c, 0.04);
        prev = c;
    }
    return finish(t, cfg, "demo_informloss.csv", log);
}

int demo_geodesic(const RunConfig& cfg, std::ostream& log) {
    validate(cfg);
    const Grid g(cfg.n_cells);
    std::mt19937_64 rng(cfg.seed);
    const SignedMeasure mu0 = random_measure(g, rng), mu1 = random_measure(g, rng);
    const auto d = wb2tilde(mu0, mu1);
    const double budget = 2.0 * g.h() * d.plan->total_mass();
    const std::vector<double> ts{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<SignedMeasure> pts;
    for (double s : ts) pts.push_back(geodesic_interpolate(mu0, mu1, s));
    auto os = open_out(cfg, "demo_geodesic_table.csv");
    os << "s,t,distance,linear_prediction\n";
    CheckTable t;
    t.at_most("endpoint_t0", max_abs_diff(pts.front(), mu0), 1e-12);
    t.at_most("endpoint_t1_distance", wb2tilde(pts.back(), mu1).cost, budget);
    double worst = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = i + 1; j < ts.size(); ++j) {
            const double dij = wb2tilde(pts[i], pts[j]).cost;
            const double lin = (ts[j] - ts[i]) * d.cost;
            os << fmt_double(ts[i]) << ',' << fmt_double(ts[j]) << ',' << fmt_double(dij) << ',' << fmt_double(lin)
               << '\n';
            worst = std::max(worst, std::abs(dij - lin));
        }
    t.at_most("constant_speed", worst, budget);
    log << "W~b2(mu0,mu1)=" << fmt_double(d.cost) << " rebinning budget 2h*mass=" << fmt_double(budget) << '\n';
    return finish(t, cfg, "demo_geodesic.csv", log);
}

} // namespace

// commands ----------------------------------------------------------------

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
    const Problem p = setup(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory tr = run_scheme(p.initial, p.pot, jko_config(cfg, cfg.tau), cfg.t_end);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    {
        auto os = open_out(cfg, "trajectory.csv");
        write_trajectory(os, tr);
    }
    {
        auto os = open_out(cfg, "energy.csv");
        write_energy(os, tr, p.pot);
    }
    double sum2 = 0.0;
    for (const auto& s : tr.steps) sum2 += s.cost2;
    log << "steps=" << tr.steps.size() << " final_H=" << fmt_double(functional_H(tr.states.back(), p.pot).total_H)
        << " sum_T2=" << fmt_double(sum2) << " wall_time=" << wall << "s\n";
    return kOk;
}

int cmd_pde(const RunConfig& cfg, std::ostream& log) {
    const Problem p = setup(cfg);
    FdConfig f = fd_config(cfg);
    // record on the JKO step spacing so both trajectory files line up
    f.record_every = std::max(1, static_cast<int>(std::lround(cfg.tau / cfg.dt)));
    const DensityTable tab = fd_solve(restrict_interior(p.initial), p.pot, f, p.initial.b0, p.initial.b1);
    {
        auto os = open_out(cfg, "pde_trajectory.csv");
        write_density_table(os, tab);
    }
    const auto last = tab.measure(tab.times.size() - 1);
    log << "records=" << tab.times.size() << " final_interior_mass=" << fmt_double(last.interior_total())
        << " b0=" << fmt_double(last.b0) << " b1=" << fmt_double(last.b1) << '\n';
    return kOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& log) {
    if (cfg.tau_list.empty()) throw Error(Errc::PreconditionViolated, "tau_list is empty");
    const Problem p = setup(cfg);
    FdConfig f = fd_config(cfg);
    const DensityTable tab = fd_solve(restrict_interior(p.initial), p.pot, f, p.initial.b0, p.initial.b1);
    const std::vector<double> times = cfg.sample_times.empty() ? std::vector<double>{cfg.t_end} : cfg.sample_times;
    auto fd_at = [&](double t) {
        std::size_t best = 0;
        for (std::size_t k = 0; k < tab.times.size(); ++k)
            if (std::abs(tab.times[k] - t) < std::abs(tab.times[best] - t)) best = k;
        return restrict_interior(tab.measure(best));
    };

    auto os = open_out(cfg, "compare.csv");
    os << "tau,t,l1_error,wb2_error\n";
    std::vector<double> final_l1;
    for (double tau : cfg.tau_list) {
        const Trajectory tr = run_scheme(p.initial, p.pot, jko_config(cfg, tau), cfg.t_end);
        for (double t : times) {
            const InteriorMeasure a = restrict_interior(tr.state_at(t));
            const InteriorMeasure b = fd_at(t);
            double l1 = 0.0;
            for (int c = 0; c < p.grid.n(); ++c) l1 += std::abs(a.mass[c] - b.mass[c]);
            const double w = wb2(a, b).cost;
            os << fmt_double(tau) << ',' << fmt_double(t) << ',' << fmt_double(l1) << ',' << fmt_double(w) << '\n';
            if (t == times.back()) final_l1.push_back(l1);
        }
        log << "tau=" << label(tau) << " l1_error(t=" << label(times.back()) << ")=" << fmt_double(final_l1.back())
            << '\n';
    }
    // the error must not grow as tau shrinks, up to solver and quadrature noise
    const double noise = 10.0 * (cfg.solver_tol + p.grid.h() * p.grid.h());
    CheckTable t;
    for (std::size_t i = 0; i + 1 < cfg.tau_list.size(); ++i) {
        const std::size_t big = cfg.tau_list[i] > cfg.tau_list[i + 1] ? i : i + 1;
        const std::size_t small = big == i ? i + 1 : i;
        t.at_most("l1_increase_tau" + label(cfg.tau_list[small]), final_l1[small] - final_l1[big], noise);
    }
    return finish(t, cfg, "compare_checks.csv", log);
}

int cmd_distance(const RunConfig& cfg, const std::string& file_a, const std::string& file_b, const std::string& kind,
                 std::ostream& log) {
    const SignedMeasure a = read_measure(file_a), b = read_measure(file_b);
    require_same_grid(a.grid, b.grid);
    CostResult r;
    if (kind == "wb2") r = wb2(restrict_interior(a), restrict_interior(b));
    else if (kind == "wb2tilde") r = wb2tilde(a, b);
    else if (kind == "t") r = t_cost(a, b);
    else throw Error(Errc::PreconditionViolated, "unknown kind '" + kind + "'");
    log << "kind=" << kind << " status=" << (r.infinite() ? "infeasible" : "optimal")
        << " distance=" << (r.infinite() ? "inf" : fmt_double(r.cost)) << '\n';
    if (r.plan) {
        auto os = open_out(cfg, "plan.csv");
        write_plan(*r.plan, os);
    }
    return kOk;
}

int cmd_slope(const RunConfig& cfg, const std::string& file, std::ostream& log) {
    validate(cfg);
    const SignedMeasure mu = read_measure(file);
    const PotentialData pot = make_potential(cfg, mu.grid);
    const SlopeResult s = slope(mu, pot, cfg.h_threshold);
    PotentialData pot0 = pot;
    pot0.psi0 = pot0.psi1 = 0.0;
    const SlopeResult w = wb2_slope(restrict_interior(mu), pot0, cfg.h_threshold);
    auto os = open_out(cfg, "slope.csv");
    os << "functional,value,fisher_part,boundary_violation,finite\n";
    os << "H," << fmt_double(s.value) << ',' << fmt_double(s.fisher_part) << ',' << fmt_double(s.boundary_violation)
       << ',' << (s.finite() ? "true" : "false") << '\n';
    os << "wb2," << fmt_double(w.value) << ',' << fmt_double(w.fisher_part) << ',' << fmt_double(w.boundary_violation)
       << ',' << (w.finite() ? "true" : "false") << '\n';
    log << "slope2=" << (s.finite() ? fmt_double(s.value) : "inf") << " fisher_part=" << fmt_double(s.fisher_part)
        << " boundary_violation=" << fmt_double(s.boundary_violation)
        << " wb2_slope2=" << (w.finite() ? fmt_double(w.value) : "inf") << '\n';
    return kOk;
}

int cmd_diagnose(const RunConfig& cfg, std::ostream& log) {
    const Problem p = setup(cfg);
    const JkoConfig jc = jko_config(cfg, cfg.tau);
    const Trajectory tr = run_scheme(p.initial, p.pot, jc, cfg.t_end);
    const double h = p.grid.h();

    double gap_min = std::numeric_limits<double>::infinity(), lower_min = gap_min;
    double eq_max = 0.0, c_max = 0.0, resolve_max = 0.0;
    {
        auto os = open_out(cfg, "steps.csv");
        os << "step,t,descent_gap,kkt_residual,bound_a_min,bound_b_max,import_cells,transport_map_constant,front_stencils_excluded\n";
        for (std::size_t k = 0; k < tr.steps.size(); ++k) {
            const auto& st = tr.steps[k];
            const auto r = verify_step_optimality(st, tr.states[k], p.pot, jc);
            gap_min = std::min(gap_min, st.descent_gap);
            lower_min = std::min(lower_min, r.lower_bound_min);
            eq_max = std::max(eq_max, r.import_equality_max);
            c_max = std::max(c_max, r.transport_map_constant);
            // cold re-solve: the minimizer does not depend on the solver path
            resolve_max = std::max(resolve_max, max_abs_diff(jko_step(tr.states[k], p.pot, jc).minimizer, st.minimizer));
            os << k + 1 << ',' << fmt_double(tr.times[k + 1]) << ',' << fmt_double(st.descent_gap) << ','
               << fmt_double(st.kkt_residual) << ',' << fmt_double(r.lower_bound_min) << ','
               << fmt_double(r.import_equality_max) << ',' << r.import_cells << ','
               << fmt_double(r.transport_map_constant) << ',' << r.transport_map_excluded << '\n';
        }
    }
    const auto lq = contractivity_report(tr, p.pot, cfg.q_list);
    {
        auto os = open_out(cfg, "contractivity.csv");
        os << "q,step,norm,decrement\n";
        for (const auto& r : lq.rows)
            os << fmt_double(r.q) << ',' << r.step << ',' << fmt_double(r.norm) << ',' << fmt_double(r.decrement) << '\n';
    }
    const auto edi = edi_report(tr, p.pot);
    {
        auto os = open_out(cfg, "edi.csv");
        os << "t,dphi,metric2,slope2,residual\n";
        for (const auto& r : edi.records)
            os << fmt_double(r.t) << ',' << fmt_double(r.dphi) << ',' << fmt_double(r.metric2) << ','
               << fmt_double(r.slope2) << ',' << fmt_double(r.residual) << '\n';
    }
    const auto b = trajectory_bounds(tr, p.pot);
    {
        auto os = open_out(cfg, "bounds.csv");
        os << "quantity,value\n";
        os << "max_interior_mass," << fmt_double(b.max_interior_mass) << '\n';
        os << "mass_bound," << fmt_double(b.mass_bound) << '\n';
        os << "sum_T2," << fmt_double(b.sum_cost2) << '\n';
        os << "sum_T2_constant," << fmt_double(b.sum_cost2_constant) << '\n';
        os << "tv_constant," << fmt_double(b.tv_constant) << '\n';
        os << "sobolev_average," << fmt_double(b.sobolev_average) << '\n';
        os << "transport_map_constant," << fmt_double(c_max) << '\n';
        os << "edi_mean_positive," << fmt_double(edi.mean_positive) << '\n';
    }

    CheckTable t;
    if (!tr.steps.empty()) {
        t.at_least("descent_gap_min", gap_min, -std::max(1e-8, cfg.solver_tol));
        t.at_least("boundary_inequality_min", lower_min, -1e-6);
        t.at_most("boundary_equality_max", eq_max, 1e-4 + 5.0 * h);
        t.at_most("transport_map_constant", c_max, 8.0);
        t.at_most("resolve_difference", resolve_max, 1e-7);
        t.at_most("edi_residual_max", edi.max_residual, cfg.solver_tol);
    }
    t.at_most("lq_max_increase", lq.max_increase, 1e-8);
    t.at_most("mass_bound_excess", b.max_interior_mass - b.mass_bound, 1e-8);
    return finish(t, cfg, "diagnose.csv", log);
}

int cmd_demo(const RunConfig& cfg, const std::string& name, std::ostream& log) {
    if (name == "notri") return demo_notri(cfg, log);
    if (name == "notconv") return demo_notconv(cfg, log);
    if (name == "noncomplete") return demo_noncomplete(cfg, log);
    if (name == "informloss") return demo_informloss(cfg, log);
    if (name == "geodesic") return demo_geodesic(cfg, log);
    throw Error(Errc::PreconditionViolated,
                "unknown demo '" + name + "' (expected notri, notconv, noncomplete, informloss, geodesic)");
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Signed-measure gradient flows for 1D Fokker-Planck with Dirichlet data", "wbf"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path, out_dir;
    long long seed = -1;
    app.add_option("--config", config_path, "flat key=value config file");
    app.add_option("--out", out_dir, "output directory (overrides the out key)");
    app.add_option("--seed", seed, "seed for randomized checks (overrides the seed key)");

    auto* simulate = app.add_subcommand("simulate", "run the JKO scheme");
    auto* pde = app.add_subcommand("pde", "run the finite-difference oracle");
    auto* compare = app.add_subcommand("compare", "JKO vs FD error table over tau_list");
    auto* distance = app.add_subcommand("distance", "transport distance between two measure files");
    std::string file_a, file_b, kind;
    distance->add_option("fileA", file_a)->required();
    distance->add_option("fileB", file_b)->required();
    distance->add_option("--kind", kind)->required()->check(CLI::IsMember({"wb2", "wb2tilde", "t"}));
    auto* slope_cmd = app.add_subcommand("slope", "descending slope of H at a measure file");
    std::string slope_file;
    slope_cmd->add_option("file", slope_file)->required();
    auto* diagnose = app.add_subcommand("diagnose", "trajectory diagnostics with pass/fail table");
    auto* demo = app.add_subcommand("demo", "notri | notconv | noncomplete | informloss | geodesic");
    std::string demo_name;
    demo->add_option("name", demo_name)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (!out_dir.empty()) cfg.out = out_dir;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        else if (app.count("--seed")) throw Error(Errc::ParseError, "--seed must be >= 0");

        if (simulate->parsed()) return cmd_simulate(cfg, out);
        if (pde->parsed()) return cmd_pde(cfg, out);
        if (compare->parsed()) return cmd_compare(cfg, out);
        if (distance->parsed()) return cmd_distance(cfg, file_a, file_b, kind, out);
        if (slope_cmd->parsed()) return cmd_slope(cfg, slope_file, out);
        if (diagnose->parsed()) return cmd_diagnose(cfg, out);
        if (demo->parsed()) return cmd_demo(cfg, demo_name, out);
        return kConfigError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
}

} // namespace wbf::cli
