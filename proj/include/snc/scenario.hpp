// scenario.hpp - Experiment description: units, traffic, network, bound and simulation blocks.
//
// Documents are JSON objects (comments allowed). Rates are given in the document's rate unit and
// durations in seconds; conversion to bits/slot and slots happens here and nowhere else.

#ifndef SNC_SCENARIO_HPP
#define SNC_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "snc/bounds.hpp"
#include "snc/envelope_models.hpp"
#include "snc/simulator.hpp"
#include "snc/theta_search.hpp"

namespace snc {

enum class RateUnit { bit_per_s, kbit_per_s, mbit_per_s };

const char* to_string(RateUnit unit);
double unit_factor(RateUnit unit); // bit/s per unit

double to_bits_per_slot(double rate, RateUnit unit, double slot_length_s);
double from_bits_per_slot(double bits_per_slot, RateUnit unit, double slot_length_s);

struct UnitsBlock {
    double slot_length_s = 1e-3;
    RateUnit rate_unit = RateUnit::bit_per_s;
    bool operator==(const UnitsBlock&) const = default;
};

struct TrafficBlock {
    double peak_rate = 0.0; // rate unit
    double mean_on_s = 0.0;
    double mean_off_s = 0.0;
    std::uint64_t through_flows = 1; // N
    std::uint64_t cross_flows = 0;   // M per hop
    bool operator==(const TrafficBlock&) const = default;
};

struct FlowPoint {
    std::uint64_t through = 0;
    std::uint64_t cross = 0;
    bool operator==(const FlowPoint&) const = default;
};

struct NetworkBlock {
    double capacity = 0.0; // rate unit
    std::vector<int> hops{1};
    // N+M totals swept with N = M = total/2 (mutually exclusive with flow_pairs)
    std::vector<std::uint64_t> flow_totals;
    std::vector<FlowPoint> flow_pairs;
    bool operator==(const NetworkBlock&) const = default;

    // Explicit pairs, or totals split evenly; empty if no flow sweep was given.
    std::vector<FlowPoint> flow_sweep() const;
};

enum class KindSelection { backlog, delay, both };
const char* to_string(KindSelection kind);

struct ThetaOverrides {
    std::optional<double> theta_min;
    std::optional<double> theta_max;
    std::optional<int> coarse_grid_points;
    std::optional<double> refine_tolerance;
    bool operator==(const ThetaOverrides&) const = default;
};

struct BoundBlock {
    KindSelection kind = KindSelection::delay;
    std::vector<double> epsilons{1e-9};
    Horizon horizon = Horizon::infinite();
    ThetaOverrides theta_search;
    bool operator==(const BoundBlock&) const = default;
};

struct SimBlock {
    std::optional<std::int64_t> warmup_slots; // default 10 * max(E[T_on], E[T_off]) in slots
    std::int64_t measure_slots = 1'000'000;
    int replications = 10;
    std::uint64_t seed = 1;
    double max_backlog_slots = 1e6;
    double slack = 0.0;
    bool operator==(const SimBlock&) const = default;
};

struct Scenario {
    std::string id = "scenario";
    UnitsBlock units;
    TrafficBlock traffic;
    NetworkBlock network;
    std::optional<BoundBlock> bound;
    std::optional<SimBlock> sim;

    bool operator==(const Scenario&) const = default;

    MmooParams source() const;
    double capacity_bits_per_slot() const;
    double slots_to_seconds(double slots) const { return slots * units.slot_length_s; }

    HomogeneousNetwork network_at(int hops, std::uint64_t through, std::uint64_t cross) const;
    // Defaults from default_theta_search with the bound block's overrides applied.
    ThetaSearchConfig theta_search(const NetworkPath& path) const;
    // Requires the sim block.
    SimScenario sim_scenario(int hops, std::uint64_t through, std::uint64_t cross) const;
};

// Parses and validates a scenario document. Throws ScenarioError listing every problem found
// (with line/column for syntax errors and dotted field paths otherwise).
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const Scenario& scenario);

} // namespace snc

#endif // SNC_SCENARIO_HPP
