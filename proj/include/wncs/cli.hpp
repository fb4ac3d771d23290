#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wncs/scenario.hpp"

namespace wncs {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDiverged = 3;

struct RunOverrides {
  std::optional<Policy> policy;
  std::optional<long> horizon;
  std::optional<std::uint64_t> seed;
};

// Single episode; writes trace.csv and summary.json into out_dir.
int cmd_run(const std::filesystem::path& scenario_path,
            const RunOverrides& overrides,
            const std::filesystem::path& out_dir);

// Monte-Carlo comparison across policies; writes comparison.json.
// Needs runs >= 2 so the confidence interval is defined.
int cmd_compare(const std::filesystem::path& scenario_path,
                const RunOverrides& overrides,
                const std::vector<Policy>& policies, int runs,
                const std::filesystem::path& out_dir);

enum class CurveKind { kRateDistortion, kBottleneck };

struct CurveRequest {
  CurveKind kind = CurveKind::kRateDistortion;
  std::filesystem::path input;
  std::vector<double> betas;
  int t_size = 2;       // bottleneck only
  int restarts = 10;    // bottleneck only
  std::uint64_t seed = 1;
  std::filesystem::path out = "curve.csv";
};

// Sweeps beta and writes a beta,rate,relevance_or_distortion CSV.
int cmd_curves(const CurveRequest& request);

// "start:stop:step" (inclusive endpoints) or a comma list of values.
std::vector<double> parse_beta_grid(const std::string& text);

// Comma list of policy names.
std::vector<Policy> parse_policy_list(const std::string& text);

// Full argv-level entry point; returns the process exit code.
int cli_main(int argc, const char* const* argv);

}  // namespace wncs
