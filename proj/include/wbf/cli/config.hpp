#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "wbf/jko.hpp"
#include "wbf/measures.hpp"
#include "wbf/pde.hpp"

namespace wbf::cli {

// Flat key=value run configuration; '#' starts a comment.
struct RunConfig {
    int n_cells = 64;

    double tau = 1e-2;
    double solver_tol = 1e-8;
    int max_outer_iters = 200;
    Scheme scheme = Scheme::t_scheme;

    double dt = 1e-4;
    double theta = 1.0;

    std::string potential = "zero";  // zero | linear:<a> | doublewell | file:<path>
    double psi0 = 0.0;
    double psi1 = 0.0;
    std::string rho0 = "uniform";    // uniform | sine | stationary | file:<path>
    double b0_weight = 0.5;          // share of the compensating atom placed at 0

    double t_end = 0.1;
    std::vector<double> tau_list;
    std::vector<double> sample_times;  // compare: empty means t_end only
    std::vector<double> q_list{1.0, 2.0, 4.0};
    double h_threshold = 10.0;
    int n_max = 7;                     // noncomplete demo

    std::string out = ".";
    std::uint64_t seed = 0;
};

// Parses a config stream on top of the defaults; `source` names it in errors.
RunConfig parse_config(std::istream& is, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);
// Applies one pair; throws ParseError for unknown keys or bad values.
void set_key(RunConfig& cfg, const std::string& key, const std::string& value, int line = 0);
// Cross-field checks: positivity, ranges, referenced files exist.
void validate(const RunConfig& cfg);

Grid make_grid(const RunConfig& cfg);
PotentialData make_potential(const RunConfig& cfg, const Grid& g);
SignedMeasure make_initial(const RunConfig& cfg, const Grid& g, const PotentialData& pot);
JkoConfig jko_config(const RunConfig& cfg, double tau);
FdConfig fd_config(const RunConfig& cfg);

} // namespace wbf::cli
