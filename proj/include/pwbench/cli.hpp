#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pwbench::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kDataError = 2,
    kResourceLimit = 3,
};

inline constexpr std::string_view kVersion = "1.0.0";
inline constexpr std::string_view kManifestFormat = "pwbench-manifest/1";

/**
 * Everything needed to re-run one subcommand: its name, the options it ran
 * with (explicit values and non-empty defaults), and digests of its inputs.
 *
 * Serialized as `key=value` lines; parse(serialize()) reproduces the value and
 * serialize(parse(text)) reproduces manifests written by this program byte for
 * byte.
 */
struct RunConfig {
    std::string version{kVersion};
    std::string command;
    /// Long option name without dashes, value ("true" for a set flag). Repeats allowed.
    std::vector<std::pair<std::string, std::string>> options;
    /// Option name and `sha256:<hex>` digest (or `stdin`).
    std::vector<std::pair<std::string, std::string>> inputs;

    std::string serialize() const;
    static RunConfig parse(std::string_view text);
    static RunConfig load(const std::string& path);

    /// Last value given for an option, or empty.
    std::string value(std::string_view name) const;
    /// Argument vector (without program name) that reproduces the run.
    std::vector<std::string> to_args() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Digest string recorded for an input path: a file, a model directory, or "-".
std::string input_digest(const std::string& path);

/// Runs one command line (argv[0] is the program name) and returns the exit status.
int cli_dispatch(int argc, const char* const* argv);
int cli_dispatch(const std::vector<std::string>& args);

}  // namespace pwbench::cli
