#pragma once

// Command orchestration: config loading, runs, and report files.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "parq/io.hpp"

namespace parq {

/// Every field has a key of the same name in the JSON config file.
/// Unset optionals fall back to per-command defaults.
struct RunConfig {
    Model model = counterexample_space();
    std::optional<Policy> policy;
    std::vector<std::size_t> horizons;
    std::optional<std::size_t> replications;
    std::optional<std::size_t> burn_in;
    std::uint64_t seed = 1;
    std::size_t truncation = 1000;
    double tolerance = 0.0;
    std::string output_dir = ".";
    /// Sample index omega (0-based) that cyclic runs are seen from.
    std::int64_t start = 0;
    std::optional<int> servers;
    std::optional<int> p;
    std::optional<std::size_t> stall_window;
    /// fixed-point and counterexample: also write the per-piece trace.
    bool trace = false;
    unsigned threads = 0;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const RunConfig& cfg);

json config_to_json(const RunConfig& cfg);
/// Rejects unknown keys and invalid values, naming the field.
RunConfig config_from_json(const json& j);
RunConfig load_config(const std::string& path);

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"simulate", "loynes", "zstats", "stability",
                                                "fixed-point", "counterexample", "loss"};
    return names;
}

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitInvalid = 2;

/// Runs one command, writing reports under cfg.output_dir and a one-line
/// summary per artifact to `out`. Errors go to `err`.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command line: parq <command> [--config f] [flags]. Flags override the file.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace parq
