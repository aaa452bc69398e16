#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gho/grid.hpp"
#include "gho/params.hpp"

namespace gho::cli {

/// One invocation: a command plus the options shared by all commands.
struct ExperimentSpec {
    std::string command;
    std::string scenario_path;
    std::string out_dir = ".";
    std::optional<GridSpec> grid;
    std::vector<double> times;
    std::optional<std::pair<int, int>> modes;
    std::optional<BasisInitialData> basis;
    std::optional<InitialData> xp;
    std::map<std::string, double> tolerances;
};

/// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInputError = 2;

// Option parsers; all throw std::invalid_argument with a message naming the flag.
GridSpec parse_grid(const std::string& text);                    ///< "xmin,xmax,n"
std::vector<double> parse_times(const std::string& text);        ///< "t0,t1,..."
std::pair<int, int> parse_modes(const std::string& text);        ///< "n0..n1" or "n"
std::optional<BasisInitialData> parse_basis(const std::string& text);  ///< "default" or "custom:u0,udot0,v0,vdot0"
InitialData parse_xp(const std::string& text);                   ///< "x0,xdot0"
std::pair<std::string, double> parse_tolerance(const std::string& text);  ///< "name=value"

enum class Status { Pass, Fail, Skip };

struct CheckResult {
    std::string name;
    double value;
    double tolerance;
    Status status;
    std::string reason;  ///< Skip or failure explanation.
};

/// "CHECK <name> value=<v> tol=<t> PASS|FAIL|SKIP(<reason>)".
std::string format_check(const CheckResult& c);

/// Default tolerance per verify check name.
const std::map<std::string, double>& default_tolerances();

/// Property suite for one scenario. Every check is isolated: a caustic in a
/// requested configuration is reported as SKIP, any other error as FAIL.
/// Writes one CHECK line per check to `report`.
std::vector<CheckResult> run_verify(const Scenario& s, const ExperimentSpec& spec, std::ostream& report);

/// Full command dispatch. Returns the process exit status; errors in the
/// input (scenario, flags) give kExitInputError.
int run(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace gho::cli
