#pragma once

#include "nitool/document.hpp"
#include "nitool/stability.hpp"

#include "json.hpp"

#include <string>

namespace nitool {

// Exit codes shared by every subcommand: 0 affirmative, 1 usage/parse,
// 2 negative verdict, 3 inconclusive or precondition failure.
inline constexpr int kExitOk           = 0;
inline constexpr int kExitUsage        = 1;
inline constexpr int kExitNegative     = 2;
inline constexpr int kExitInconclusive = 3;

struct CommandResult {
    int                    exit_code = kExitOk;
    nlohmann::ordered_json report;
    std::string            text;  // human-readable rendering of the same report
};

struct CliOptions {
    Tolerances  tol{};
    SweepConfig sweep{};
    bool        json      = false;
    bool        det_sweep = false;  // classify: also sweep |det(R - R*)|
};

CommandResult cmd_classify(const std::string& path, const CliOptions& opts);
CommandResult cmd_stability(const std::string& c_role_path, const std::string& cs_role_path,
                            const CliOptions& opts);
CommandResult cmd_margin(const std::string& path, MarginPart part, const CliOptions& opts);
CommandResult cmd_sweep(const std::string& path, const std::string& out_path,
                        const CliOptions& opts);
CommandResult cmd_example(double k, double alpha, const CliOptions& opts);

/// Full command-line front end; returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace nitool
