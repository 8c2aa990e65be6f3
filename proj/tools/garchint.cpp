#include "garchint/cli.hpp"
#include "garchint/errors.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"GARCH-intensity option pricing batch runner"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::vector<std::string> overrides;
    garchint::RunOptions options;

    const char* commands[][2] = {
        {"simulate", "simulate paths and write terminal.csv (and paths.csv)"},
        {"price", "price one European option and write price.csv"},
        {"smile", "build the implied-volatility smile and write smile.csv"},
        {"calibrate", "fit the intensity recursion to a returns CSV and write fit_result.json"},
        {"verify", "run the martingale and measure-change checks and write verify_report.txt"},
    };
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c[0], c[1]);
        sub->add_option("config", config_path, "JSON config file")->required();
        sub->add_option("overrides", overrides, "dotted key=value overrides");
        sub->add_option("--out,-o", options.output_dir, "output directory (default $GARCHINT_OUTPUT_DIR or ./out)");
        sub->add_option("--threads,-j", options.threads, "worker threads, 0 = all cores");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int status = app.exit(e);
        return status == 0 ? 0 : 2;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    return garchint::run(garchint::parse_command(name), config_path, overrides, options, std::cerr);
}
