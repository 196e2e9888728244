#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "extqv/montecarlo.hpp"

namespace extqv::cli {

enum class Subcommand { simulate, estimate, sweep, compare, figures_data };
enum class Format { csv, ndjson };

/// Fully resolved command line: config file values overlaid by flags.
struct CliConfig {
    Subcommand subcommand = Subcommand::sweep;
    std::optional<std::string> config_path;
    ExperimentConfig experiment;
    std::string output_dir = ".";
    Format format = Format::csv;
    int workers = 0;
    std::string input;            ///< estimate: path CSV
    bool keep_fast = false;       ///< simulate: write the y column
    bool paper_scale = false;
    double path_epsilon = 0.1;    ///< figures-data: overlay path
    std::size_t path_n = 1000;
    std::set<std::string> given;  ///< canonical keys set by file or flag
    std::string digest;
};

/// Thrown by parse_config for --help; carries the rendered usage text.
struct HelpRequested {
    std::string text;
};

/// Parses argv (argv[0] is the program name). Throws ConfigError naming the
/// offending key and its source for unknown keys, type mismatches and
/// missing required values.
CliConfig parse_config(const std::vector<std::string>& args);

/// Runs the subcommand, writing artifacts under output_dir and short reports
/// to out. Returns 0 on success, 2 on runtime failure (including partial
/// sweeps). Throws ConfigError for semantic config errors.
int run_command(const CliConfig& config, std::ostream& out, std::ostream& err);

/// parse_config + run_command with exit codes 0 / 1 (usage, config) / 2 (runtime).
int main_entry(int argc, char** argv);

}  // namespace extqv::cli
