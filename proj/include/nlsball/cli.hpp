#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nlsball {

/// Flat run configuration; every field is a config-file key of the same name.
struct RunConfig {
    int N = 3;
    double p = 3.0;
    int sign = 1;                 ///< "focusing" / "+1" or "defocusing" / "-1"
    double d_min = 1e-2;          ///< lambda = -lambda_1 + sign d, d log-spaced on [d_min, d_max]
    double d_max = 1e3;
    int count = 60;
    double alpha_max = 1e4;       ///< figure1: largest alpha
    int nodes = 2049;
    double grading = 0.0;         ///< 0: automatic
    double ode_tolerance = 1e-10;
    double bisection_tolerance = 1e-15;
    double band = 1e-3;           ///< stability band on alpha mu'/mu
    int eig_samples = 11;
    int l_max = 3;
    int spectrum_points = 10;
    double spectrum_lambda_max = 250.0;  ///< verify: spectrum only where the l = 1 gap is resolvable
    double lambda = 10.0;         ///< probe: focusing point
    double delta = 1e-3;
    double T = 50.0;
    double dt = 1e-3;
    double sample_interval = 0.1;
    double sup_cap = 1e4;
    std::string output = "-";     ///< "-" writes to standard output
};

/// Sets one key; throws ConfigError for unknown keys or malformed values.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// Reads `key = value` lines ('#' starts a comment) on top of `base`. Keys are case-sensitive;
/// unknown or repeated keys are rejected.
RunConfig parse_config(std::istream& in, RunConfig base = {});

/// Canonical `key = value` listing of every field.
std::string format_config(const RunConfig& config);

/// Throws ParameterError when the configuration cannot describe a valid run.
void validate_config(const RunConfig& config);

/// Exit codes shared by every command.
enum ExitCode { exit_ok = 0, exit_numeric = 1, exit_parameter = 2, exit_blowup = 3 };

/// Commands write their artifact to `out` and diagnostics to `err`, and return an exit code.
/// Errors are mapped to exit codes here, never propagated.
int cmd_eig(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_branch(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_figure1(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_probe(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Names accepted by run_command.
const std::vector<std::string>& command_names();

/// Dispatches by name; unknown names give exit_parameter.
int run_command(const std::string& name, const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace nlsball
