#include "wbf/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace wbf::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string where(int line) { return line > 0 ? "line " + std::to_string(line) + ": " : ""; }

double to_double(const std::string& v, const std::string& key, int line) {
    const char* b = v.c_str();
    char* e = nullptr;
    const double x = std::strtod(b, &e);
    if (v.empty() || *e != '\0' || !std::isfinite(x))
        throw Error(Errc::ParseError, where(line) + "bad number '" + v + "' for " + key);
    return x;
}

long long to_int(const std::string& v, const std::string& key, int line) {
    const double x = to_double(v, key, line);
    if (x != std::floor(x) || std::abs(x) > 9e15)
        throw Error(Errc::ParseError, where(line) + "expected an integer for " + key);
    return static_cast<long long>(x);
}

std::vector<double> to_list(const std::string& v, const std::string& key, int line) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(item, key, line));
    }
    return out;
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

void require_file(const std::string& path, const std::string& key) {
    if (!std::filesystem::is_regular_file(path))
        throw Error(Errc::ParseError, key + " file '" + path + "' does not exist");
}

// `x,V` rows (increasing x spanning [0,1]), linearly interpolated.
std::function<double(double)> tabulated_potential(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(Errc::ParseError, "cannot open potential file '" + path + "'");
    std::vector<double> xs, vs;
    std::string line;
    int ln = 0;
    while (std::getline(is, line)) {
        ++ln;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw Error(Errc::ParseError, path + ": line " + std::to_string(ln) + ": expected 'x,V'");
        const double x = detail::parse_double(trim(line.substr(0, comma)), ln);
        const double v = detail::parse_double(trim(line.substr(comma + 1)), ln);
        if (!xs.empty() && !(x > xs.back()))
            throw Error(Errc::ParseError, path + ": line " + std::to_string(ln) + ": x must increase");
        xs.push_back(x);
        vs.push_back(v);
    }
    if (xs.size() < 2 || xs.front() > 0.0 || xs.back() < 1.0)
        throw Error(Errc::ParseError, path + ": samples must span [0,1]");
    return [xs, vs](double x) {
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t hi = std::clamp<std::size_t>(it - xs.begin(), 1, xs.size() - 1);
        const double w = (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
        return (1.0 - w) * vs[hi - 1] + w * vs[hi];
    };
}

} // namespace

void set_key(RunConfig& c, const std::string& key, const std::string& v, int line) {
    if (key == "n_cells") c.n_cells = static_cast<int>(to_int(v, key, line));
    else if (key == "tau") c.tau = to_double(v, key, line);
    else if (key == "solver_tol") c.solver_tol = to_double(v, key, line);
    else if (key == "max_outer_iters") c.max_outer_iters = static_cast<int>(to_int(v, key, line));
    else if (key == "scheme") {
        if (v == "t") c.scheme = Scheme::t_scheme;
        else if (v == "wb2tilde") c.scheme = Scheme::wb2tilde_scheme;
        else throw Error(Errc::ParseError, where(line) + "scheme must be t or wb2tilde");
    }
    else if (key == "dt") c.dt = to_double(v, key, line);
    else if (key == "theta") c.theta = to_double(v, key, line);
    else if (key == "potential") {
        if (!(v == "zero" || v == "doublewell" || starts_with(v, "linear:") || starts_with(v, "file:")))
            throw Error(Errc::ParseError, where(line) + "unknown potential '" + v + "'");
        if (starts_with(v, "linear:")) to_double(v.substr(7), key, line);
        c.potential = v;
    }
    else if (key == "psi0") c.psi0 = to_double(v, key, line);
    else if (key == "psi1") c.psi1 = to_double(v, key, line);
    else if (key == "rho0") {
        if (!(v == "uniform" || v == "sine" || v == "stationary" || starts_with(v, "file:")))
            throw Error(Errc::ParseError, where(line) + "unknown rho0 '" + v + "'");
        c.rho0 = v;
    }
    else if (key == "preset") {
        if (v == "heat") {
            c.potential = "zero";
            c.psi0 = c.psi1 = 0.0;
            c.rho0 = "sine";
        } else if (v == "stationary") {
            c.rho0 = "stationary";
        } else {
            throw Error(Errc::ParseError, where(line) + "unknown preset '" + v + "'");
        }
    }
    else if (key == "b0_weight") c.b0_weight = to_double(v, key, line);
    else if (key == "t_end") c.t_end = to_double(v, key, line);
    else if (key == "tau_list") c.tau_list = to_list(v, key, line);
    else if (key == "sample_times") c.sample_times = to_list(v, key, line);
    else if (key == "q_list") c.q_list = to_list(v, key, line);
    else if (key == "h_threshold") c.h_threshold = to_double(v, key, line);
    else if (key == "n_max") c.n_max = static_cast<int>(to_int(v, key, line));
    else if (key == "out") c.out = v;
    else if (key == "seed") {
        const long long s = to_int(v, key, line);
        if (s < 0) throw Error(Errc::ParseError, where(line) + "seed must be >= 0");
        c.seed = static_cast<std::uint64_t>(s);
    }
    else throw Error(Errc::ParseError, where(line) + "unknown key '" + key + "'");
}

RunConfig parse_config(std::istream& is, const std::string& source) {
    RunConfig c;
    std::string raw;
    int ln = 0;
    while (std::getline(is, raw)) {
        ++ln;
        const std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::ParseError, source + ": line " + std::to_string(ln) + ": expected key=value");
        try {
            set_key(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), ln);
        } catch (const Error& e) {
            throw Error(e.code(), source + ": " + e.what());
        }
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(Errc::ParseError, "cannot open config '" + path + "'");
    return parse_config(is, path);
}

void validate(const RunConfig& c) {
    auto need = [](bool ok, const std::string& what) {
        if (!ok) throw Error(Errc::PreconditionViolated, what);
    };
    need(c.n_cells >= 2, "n_cells must be >= 2");
    need(c.tau > 0.0, "tau must be > 0");
    need(c.solver_tol > 0.0, "solver_tol must be > 0");
    need(c.max_outer_iters > 0, "max_outer_iters must be > 0");
    need(c.dt > 0.0, "dt must be > 0");
    need(c.theta >= 0.5 && c.theta <= 1.0, "theta must lie in [0.5,1]");
    need(c.t_end >= 0.0, "t_end must be >= 0");
    need(c.b0_weight >= 0.0 && c.b0_weight <= 1.0, "b0_weight must lie in [0,1]");
    need(c.h_threshold > 0.0, "h_threshold must be > 0");
    for (double t : c.tau_list) need(t > 0.0, "tau_list entries must be > 0");
    for (double t : c.sample_times) need(t >= 0.0 && t <= c.t_end, "sample_times must lie in [0,t_end]");
    for (double q : c.q_list) need(q >= 1.0, "q_list entries must be >= 1");
    if (starts_with(c.potential, "file:")) require_file(c.potential.substr(5), "potential");
    if (starts_with(c.rho0, "file:")) require_file(c.rho0.substr(5), "rho0");
}

Grid make_grid(const RunConfig& c) { return Grid(c.n_cells); }

PotentialData make_potential(const RunConfig& c, const Grid& g) {
    std::function<double(double)> V;
    if (c.potential == "zero") {
        V = [](double) { return 0.0; };
    } else if (c.potential == "doublewell") {
        V = [](double x) { return 64.0 * (x - 0.25) * (x - 0.25) * (x - 0.75) * (x - 0.75); };
    } else if (starts_with(c.potential, "linear:")) {
        const double a = to_double(c.potential.substr(7), "potential", 0);
        V = [a](double x) { return a * x; };
    } else {
        V = tabulated_potential(c.potential.substr(5));
    }
    return sample_potential(g, V, c.psi0, c.psi1);
}

SignedMeasure make_initial(const RunConfig& c, const Grid& g, const PotentialData& pot) {
    if (starts_with(c.rho0, "file:")) {
        SignedMeasure mu = read_measure(c.rho0.substr(5));
        require_same_grid(mu.grid, g);
        return mu;
    }
    InteriorMeasure rho;
    if (c.rho0 == "uniform") rho = sample_density(g, [](double) { return 1.0; });
    else if (c.rho0 == "sine") rho = sample_density(g, [](double x) { return 1.0 + std::sin(M_PI * x); });
    else rho = boundary_equilibrium(g, pot);
    return balanced_measure(rho, c.b0_weight);
}

JkoConfig jko_config(const RunConfig& c, double tau) {
    JkoConfig j;
    j.tau = tau;
    j.solver_tol = c.solver_tol;
    j.max_outer_iters = c.max_outer_iters;
    j.scheme = c.scheme;
    return j;
}

FdConfig fd_config(const RunConfig& c) {
    FdConfig f;
    f.dt = c.dt;
    f.theta = c.theta;
    f.t_end = c.t_end;
    return f;
}

} // namespace wbf::cli
