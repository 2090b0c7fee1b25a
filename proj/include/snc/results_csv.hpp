// results_csv.hpp - One CSV row per (sweep point, epsilon, kind).

#ifndef SNC_RESULTS_CSV_HPP
#define SNC_RESULTS_CSV_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace snc {

inline constexpr const char* kResultsCsvHeader =
    "scenario_id,kind,H,N,M,epsilon,theta_star,bound_value,bound_unit,stable,empirical_frequency,confidence_limit";

struct ResultRow {
    std::string scenario_id;
    std::string kind; // backlog | delay | empirical_backlog | empirical_delay
    int hops = 1;
    std::uint64_t through = 0;
    std::uint64_t cross = 0;
    double epsilon = 0.0;
    std::optional<double> theta_star; // 1/bit
    std::optional<double> bound_value;
    std::string bound_unit; // "bit" or "s"
    bool stable = true;
    std::optional<double> empirical_frequency;
    std::optional<double> confidence_limit;
};

// Shortest decimal that parses back to the same double; "inf"/"-inf"/"nan" for non-finite values.
std::string format_double(double value);

// Header plus one line per row, "\n"-terminated; fields containing separators are quoted.
std::string write_results_csv(std::span<const ResultRow> rows);

} // namespace snc

#endif // SNC_RESULTS_CSV_HPP
