#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "nlsball/cli.hpp"
#include "nlsball/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Normalized NLS ground states on the unit ball"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::vector<std::string> overrides;
    std::string output;
    bool print_config = false;
    app.add_option("-c,--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("-s,--set", overrides, "override one key, as key=value (repeatable)")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.add_option("-o,--output", output, "output path ('-' for stdout)");
    app.add_flag("--print-config", print_config, "print the effective configuration to stderr");

    const char* help[] = {
        "principal Dirichlet eigenpair (JSON)",
        "trace a branch with stability labels (CSV)",
        "mu(alpha) against the whole-space asymptote, N = 3, p = 3 (CSV)",
        "identity residuals and spectrum counts along a branch (JSON)",
        "orbital-stability probe of a focusing standing wave (CSV)",
    };
    std::size_t k = 0;
    for (const auto& name : nlsball::command_names()) app.add_subcommand(name, help[k++]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : nlsball::exit_parameter;
    }

    nlsball::RunConfig config;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            config = nlsball::parse_config(in);
        }
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw nlsball::ConfigError("--set expects key=value, got '" + kv + "'");
            nlsball::set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (!output.empty()) config.output = output;
    } catch (const nlsball::Error& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return nlsball::exit_parameter;
    }
    if (print_config) std::cerr << nlsball::format_config(config);

    const std::string command = app.get_subcommands().front()->get_name();
    if (config.output == "-") return nlsball::run_command(command, config, std::cout, std::cerr);
    std::ofstream file(config.output);
    if (!file) {
        std::cerr << "parameter error: cannot open '" << config.output << "' for writing\n";
        return nlsball::exit_parameter;
    }
    return nlsball::run_command(command, config, file, std::cerr);
}
