// commands.hpp - The bound / sweep / simulate / validate workflows behind the command-line tool.

#ifndef SNC_COMMANDS_HPP
#define SNC_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "snc/results_csv.hpp"
#include "snc/scenario.hpp"

namespace snc {

namespace exit_code {
inline constexpr int success = 0;
inline constexpr int usage = 1;
inline constexpr int instability = 2;
inline constexpr int validation_failure = 3;
} // namespace exit_code

// Command-line values that shadow scenario fields.
struct Overrides {
    std::optional<std::vector<double>> epsilons;
    std::optional<std::vector<int>> hops;
    std::optional<std::uint64_t> through;
    std::optional<std::uint64_t> cross;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    bool self_test = false;
    double self_test_scale = 0.5;

    // Returns a copy of the scenario with every override applied.
    Scenario apply(const Scenario& scenario) const;
};

struct CommandOutput {
    std::vector<ResultRow> rows;
    int exit_code = exit_code::success;
    std::vector<std::string> messages;
};

// Backlog and/or delay bounds for every H in the hop list and every epsilon.
// Infinite horizons use the homogeneous closed forms; finite horizons the general engine.
CommandOutput cmd_bound(const Scenario& scenario, const Overrides& overrides);
// One row per H; unstable points abort with exit code 2.
CommandOutput cmd_sweep_hops(const Scenario& scenario, const Overrides& overrides);
// One row per (N, M) point and H; points past the stability boundary are flagged, not fatal.
CommandOutput cmd_sweep_flows(const Scenario& scenario, const Overrides& overrides);
// Empirical (1 - epsilon) quantiles of simulated delay and backlog.
CommandOutput cmd_simulate(const Scenario& scenario, const Overrides& overrides);
// Simulates and checks the analytic bounds dominate the empirical tails; exit 3 on any failure.
CommandOutput cmd_validate(const Scenario& scenario, const Overrides& overrides);

// A path to an existing file is used as is; otherwise the name is looked up as <name>.json in
// $SNC_PRESET_DIR, then in the presets directory of the source tree.
std::filesystem::path resolve_scenario_path(const std::string& name_or_path);

} // namespace snc

#endif // SNC_COMMANDS_HPP
