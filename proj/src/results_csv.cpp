// results_csv.cpp

#include "snc/results_csv.hpp"

#include <charconv>
#include <cmath>

namespace snc {

std::string format_double(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

std::string quote(const std::string& field)
{
    if (field.find_first_of(",\"\r\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string optional_cell(const std::optional<double>& v)
{
    return v ? format_double(*v) : std::string();
}

} // namespace

std::string write_results_csv(std::span<const ResultRow> rows)
{
    std::string out = kResultsCsvHeader;
    out += '\n';
    for (const ResultRow& r : rows) {
        out += quote(r.scenario_id);
        out += ',';
        out += quote(r.kind);
        out += ',';
        out += std::to_string(r.hops);
        out += ',';
        out += std::to_string(r.through);
        out += ',';
        out += std::to_string(r.cross);
        out += ',';
        out += format_double(r.epsilon);
        out += ',';
        out += optional_cell(r.theta_star);
        out += ',';
        out += optional_cell(r.bound_value);
        out += ',';
        out += quote(r.bound_unit);
        out += ',';
        out += r.stable ? "true" : "false";
        out += ',';
        out += optional_cell(r.empirical_frequency);
        out += ',';
        out += optional_cell(r.confidence_limit);
        out += '\n';
    }
    return out;
}

} // namespace snc
