#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "wbf/cli/config.hpp"

namespace wbf::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kDiverged = 3 };

// Error code -> process exit code (3 for solver trouble, 2 otherwise).
int exit_code_for(Errc code);

struct CheckRow {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Pass/fail table emitted as `check,residual,tolerance,pass`.
class CheckTable {
public:
    void at_most(const std::string& name, double value, double bound) { rows_.push_back({name, value, bound, value <= bound}); }
    void at_least(const std::string& name, double value, double bound) { rows_.push_back({name, value, bound, value >= bound}); }
    void add(const std::string& name, double residual, double tolerance, bool pass) {
        rows_.push_back({name, residual, tolerance, pass});
    }
    bool all_pass() const;
    const std::vector<CheckRow>& rows() const { return rows_; }
    void write_csv(const std::string& path) const;
    void print(std::ostream& os) const;

private:
    std::vector<CheckRow> rows_;
};

int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_pde(const RunConfig& cfg, std::ostream& log);
int cmd_compare(const RunConfig& cfg, std::ostream& log);
int cmd_distance(const RunConfig& cfg, const std::string& file_a, const std::string& file_b, const std::string& kind,
                 std::ostream& log);
int cmd_slope(const RunConfig& cfg, const std::string& file, std::ostream& log);
int cmd_diagnose(const RunConfig& cfg, std::ostream& log);
int cmd_demo(const RunConfig& cfg, const std::string& name, std::ostream& log);

// Whole front end: argument parsing, dispatch, error-to-exit-code mapping.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace wbf::cli
