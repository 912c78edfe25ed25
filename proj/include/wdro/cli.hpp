#pragma once

#include "wdro/config.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace wdro::cli {

enum ExitCode : int {
    kSuccess = 0,
    kConfigOrNumericError = 1,
    kSpRefused = 2,
    kVerificationFailed = 3,
};

struct Options {
    std::filesystem::path config;
    bool allow_invalid = false;
    /// Output directory; commands print CSV to stdout when unset, except
    /// `figures`, which writes into the current directory.
    std::optional<std::filesystem::path> out;
};

int cmd_trigger(const RunConfig& config, const Options& options, std::ostream& out);
int cmd_value(const RunConfig& config, const Options& options, std::ostream& out);
int cmd_check(const RunConfig& config, const Options& options, std::ostream& out);
int cmd_figures(const RunConfig& config, const Options& options, std::ostream& out);
int cmd_simulate(const RunConfig& config, const Options& options, std::ostream& out);

/// Loads the config, dispatches `command`, and maps library exceptions to
/// exit codes with a one-line message on `err`.
int run(const std::string& command, const Options& options, std::ostream& out, std::ostream& err);

/// 17 significant digits.
std::string format_real(double v);

}  // namespace wdro::cli
