#include "wdro/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Equilibrium capacity-expansion triggers under weighted discounting"};
    app.require_subcommand(1);

    wdro::cli::Options options;
    std::string out_dir;
    const char* commands[][2] = {
        {"trigger", "Trigger x*(q), iota and SP validity over a q grid"},
        {"value", "V and dV/dq over an (x, q) grid"},
        {"check", "Run the verification suite"},
        {"figures", "Write fig1.csv, fig2.csv and fig3.csv"},
        {"simulate", "Monte Carlo replay of the equilibrium policy"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", options.config, "INI run configuration")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_flag("--allow-invalid", options.allow_invalid,
                      "Emit the raw smooth-pasting candidate when validity fails");
        sub->add_option("--out", out_dir, "Output directory");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : wdro::cli::kConfigOrNumericError;
    }
    if (!out_dir.empty()) options.out = out_dir;
    const std::string command = app.get_subcommands().front()->get_name();
    return wdro::cli::run(command, options, std::cout, std::cerr);
}
