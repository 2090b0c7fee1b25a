// scenario.cpp - Strict JSON scenario loading with exhaustive validation.

#include "snc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "snc/errors.hpp"

namespace snc {

using json = nlohmann::json;

const char* to_string(RateUnit unit)
{
    switch (unit) {
    case RateUnit::bit_per_s:
        return "bit/s";
    case RateUnit::kbit_per_s:
        return "kbit/s";
    case RateUnit::mbit_per_s:
        return "Mbit/s";
    }
    return "bit/s";
}

double unit_factor(RateUnit unit)
{
    switch (unit) {
    case RateUnit::bit_per_s:
        return 1.0;
    case RateUnit::kbit_per_s:
        return 1e3;
    case RateUnit::mbit_per_s:
        return 1e6;
    }
    return 1.0;
}

double to_bits_per_slot(double rate, RateUnit unit, double slot_length_s)
{
    return rate * unit_factor(unit) * slot_length_s;
}

double from_bits_per_slot(double bits_per_slot, RateUnit unit, double slot_length_s)
{
    return bits_per_slot / slot_length_s / unit_factor(unit);
}

const char* to_string(KindSelection kind)
{
    switch (kind) {
    case KindSelection::backlog:
        return "backlog";
    case KindSelection::delay:
        return "delay";
    case KindSelection::both:
        return "both";
    }
    return "delay";
}

std::vector<FlowPoint> NetworkBlock::flow_sweep() const
{
    if (!flow_pairs.empty()) {
        return flow_pairs;
    }
    std::vector<FlowPoint> out;
    for (std::uint64_t total : flow_totals) {
        out.push_back({total / 2, total / 2});
    }
    return out;
}

MmooParams Scenario::source() const
{
    return MmooParams::from_seconds(traffic.peak_rate * unit_factor(units.rate_unit), traffic.mean_on_s,
                                    traffic.mean_off_s, units.slot_length_s);
}

double Scenario::capacity_bits_per_slot() const
{
    return to_bits_per_slot(network.capacity, units.rate_unit, units.slot_length_s);
}

HomogeneousNetwork Scenario::network_at(int hops, std::uint64_t through, std::uint64_t cross) const
{
    HomogeneousNetwork net;
    net.through_count = through;
    net.through = TrafficModel::mmoo(source());
    net.cross_count = cross;
    net.cross = TrafficModel::mmoo(source());
    net.capacity = capacity_bits_per_slot();
    net.hops = hops;
    return net;
}

ThetaSearchConfig Scenario::theta_search(const NetworkPath& path) const
{
    ThetaSearchConfig config = default_theta_search(path);
    if (bound) {
        const ThetaOverrides& o = bound->theta_search;
        config.theta_min = o.theta_min.value_or(config.theta_min);
        config.theta_max = o.theta_max.value_or(config.theta_max);
        config.coarse_grid_points = o.coarse_grid_points.value_or(config.coarse_grid_points);
        config.refine_tolerance = o.refine_tolerance.value_or(config.refine_tolerance);
    }
    config.validate();
    return config;
}

SimScenario Scenario::sim_scenario(int hops, std::uint64_t through, std::uint64_t cross) const
{
    if (!sim) {
        throw ScenarioError("scenario '" + id + "' has no sim block");
    }
    SimScenario s;
    s.hops = hops;
    const double capacity = capacity_bits_per_slot();
    if (std::abs(capacity - std::round(capacity)) > 1e-9 * std::max(1.0, capacity)) {
        throw ScenarioError("capacity of " + std::to_string(capacity) +
                            " bits/slot is not a whole number of bits; the simulator needs integral capacity");
    }
    s.capacity_bits_per_slot = static_cast<std::int64_t>(std::llround(capacity));
    s.through_count = through;
    s.cross_count = cross;
    s.source = source();
    s.warmup_slots = sim->warmup_slots.value_or(static_cast<std::int64_t>(
        std::ceil(10.0 * std::max(traffic.mean_on_s, traffic.mean_off_s) / units.slot_length_s)));
    s.measure_slots = sim->measure_slots;
    s.replications = sim->replications;
    s.base_seed = sim->seed;
    s.max_backlog_slots = sim->max_backlog_slots;
    return s;
}

namespace {

// Collects problems while walking the document; parsing continues after the first error.
class Reader {
public:
    std::vector<std::string> problems;

    void problem(const std::string& path, const std::string& what) { problems.push_back(path + ": " + what); }

    const json* object(const json& parent, const std::string& key, const std::string& path, bool required)
    {
        if (!parent.contains(key)) {
            if (required) {
                problem(path, "missing required block");
            }
            return nullptr;
        }
        const json& v = parent.at(key);
        if (!v.is_object()) {
            problem(path, "must be an object");
            return nullptr;
        }
        return &v;
    }

    void allowed_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys)
    {
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& item : obj.items()) {
            if (!allowed.count(item.key())) {
                problem(join(path, item.key()), "unknown key");
            }
        }
    }

    std::optional<double> number(const json& obj, const std::string& key, const std::string& path, bool required)
    {
        const std::string where = join(path, key);
        if (!obj.contains(key)) {
            if (required) {
                problem(where, "missing required field");
            }
            return std::nullopt;
        }
        const json& v = obj.at(key);
        if (!v.is_number()) {
            problem(where, "must be a number");
            return std::nullopt;
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            problem(where, "must be finite");
            return std::nullopt;
        }
        return d;
    }

    std::optional<std::uint64_t> count(const json& v, const std::string& where)
    {
        if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            return v.get<std::uint64_t>();
        }
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) {
                return static_cast<std::uint64_t>(d);
            }
        }
        problem(where, "must be a nonnegative integer");
        return std::nullopt;
    }

    std::optional<std::uint64_t> count(const json& obj, const std::string& key, const std::string& path,
                                       bool required)
    {
        const std::string where = join(path, key);
        if (!obj.contains(key)) {
            if (required) {
                problem(where, "missing required field");
            }
            return std::nullopt;
        }
        return count(obj.at(key), where);
    }

    std::optional<std::string> string(const json& obj, const std::string& key, const std::string& path,
                                      bool required)
    {
        const std::string where = join(path, key);
        if (!obj.contains(key)) {
            if (required) {
                problem(where, "missing required field");
            }
            return std::nullopt;
        }
        if (!obj.at(key).is_string()) {
            problem(where, "must be a string");
            return std::nullopt;
        }
        return obj.at(key).get<std::string>();
    }

    static std::string join(const std::string& path, const std::string& key)
    {
        return path.empty() ? key : path + "." + key;
    }
};

void require_positive(Reader& r, const std::optional<double>& v, const std::string& where)
{
    if (v && !(*v > 0.0)) {
        r.problem(where, "must be positive");
    }
}

void check_convertible(Reader& r, double bits_per_slot, const std::string& where)
{
    if (!std::isfinite(bits_per_slot) || bits_per_slot > 9.0e18) {
        r.problem(where, "overflows when converted to bits per slot");
    }
}

UnitsBlock read_units(Reader& r, const json& obj)
{
    UnitsBlock u;
    r.allowed_keys(obj, "units", {"slot_length_s", "rate_unit"});
    if (auto v = r.number(obj, "slot_length_s", "units", true)) {
        require_positive(r, v, "units.slot_length_s");
        u.slot_length_s = *v;
    }
    if (auto s = r.string(obj, "rate_unit", "units", true)) {
        if (*s == "bit/s") {
            u.rate_unit = RateUnit::bit_per_s;
        } else if (*s == "kbit/s") {
            u.rate_unit = RateUnit::kbit_per_s;
        } else if (*s == "Mbit/s") {
            u.rate_unit = RateUnit::mbit_per_s;
        } else {
            r.problem("units.rate_unit", "must be one of bit/s, kbit/s, Mbit/s (got '" + *s + "')");
        }
    }
    return u;
}

TrafficBlock read_traffic(Reader& r, const json& obj)
{
    TrafficBlock t;
    r.allowed_keys(obj, "traffic", {"peak_rate", "mean_on_s", "mean_off_s", "through_flows", "cross_flows"});
    if (auto v = r.number(obj, "peak_rate", "traffic", true)) {
        require_positive(r, v, "traffic.peak_rate");
        t.peak_rate = *v;
    }
    if (auto v = r.number(obj, "mean_on_s", "traffic", true)) {
        require_positive(r, v, "traffic.mean_on_s");
        t.mean_on_s = *v;
    }
    if (auto v = r.number(obj, "mean_off_s", "traffic", true)) {
        require_positive(r, v, "traffic.mean_off_s");
        t.mean_off_s = *v;
    }
    if (auto v = r.count(obj, "through_flows", "traffic", true)) {
        if (*v < 1) {
            r.problem("traffic.through_flows", "must be at least 1");
        }
        t.through_flows = *v;
    }
    if (auto v = r.count(obj, "cross_flows", "traffic", false)) {
        t.cross_flows = *v;
    }
    return t;
}

NetworkBlock read_network(Reader& r, const json& obj)
{
    NetworkBlock n;
    r.allowed_keys(obj, "network", {"capacity", "hops", "flow_totals", "flow_pairs"});
    if (auto v = r.number(obj, "capacity", "network", true)) {
        require_positive(r, v, "network.capacity");
        n.capacity = *v;
    }
    if (obj.contains("hops")) {
        const json& h = obj.at("hops");
        std::vector<json> items = h.is_array() ? std::vector<json>(h.begin(), h.end()) : std::vector<json>{h};
        n.hops.clear();
        if (items.empty()) {
            r.problem("network.hops", "sweep list must be nonempty");
        }
        for (std::size_t i = 0; i < items.size(); ++i) {
            const std::string where = "network.hops[" + std::to_string(i) + "]";
            auto c = r.count(items[i], where);
            if (c && (*c < 1 || *c > 100000)) {
                r.problem(where, "hop count must lie in [1, 100000]");
            } else if (c) {
                n.hops.push_back(static_cast<int>(*c));
            }
        }
    }
    if (obj.contains("flow_totals")) {
        const json& ft = obj.at("flow_totals");
        if (!ft.is_array() || ft.empty()) {
            r.problem("network.flow_totals", "must be a nonempty list of even totals N+M");
        } else {
            for (std::size_t i = 0; i < ft.size(); ++i) {
                const std::string where = "network.flow_totals[" + std::to_string(i) + "]";
                auto c = r.count(ft[i], where);
                if (c && (*c < 2 || *c % 2 != 0)) {
                    r.problem(where, "total must be an even number >= 2 so that N = M");
                } else if (c) {
                    n.flow_totals.push_back(*c);
                }
            }
        }
    }
    if (obj.contains("flow_pairs")) {
        const json& fp = obj.at("flow_pairs");
        if (!fp.is_array() || fp.empty()) {
            r.problem("network.flow_pairs", "must be a nonempty list of [N, M] pairs");
        } else {
            for (std::size_t i = 0; i < fp.size(); ++i) {
                const std::string where = "network.flow_pairs[" + std::to_string(i) + "]";
                if (!fp[i].is_array() || fp[i].size() != 2) {
                    r.problem(where, "must be a [N, M] pair");
                    continue;
                }
                auto through = r.count(fp[i][0], where + "[0]");
                auto cross = r.count(fp[i][1], where + "[1]");
                if (through && *through < 1) {
                    r.problem(where + "[0]", "N must be at least 1");
                } else if (through && cross) {
                    n.flow_pairs.push_back({*through, *cross});
                }
            }
        }
    }
    if (obj.contains("flow_totals") && obj.contains("flow_pairs")) {
        r.problem("network", "flow_totals and flow_pairs are mutually exclusive");
    }
    return n;
}

BoundBlock read_bound(Reader& r, const json& obj)
{
    BoundBlock b;
    r.allowed_keys(obj, "bound", {"kind", "epsilon", "horizon", "theta_search"});
    if (auto s = r.string(obj, "kind", "bound", false)) {
        if (*s == "backlog") {
            b.kind = KindSelection::backlog;
        } else if (*s == "delay") {
            b.kind = KindSelection::delay;
        } else if (*s == "both") {
            b.kind = KindSelection::both;
        } else {
            r.problem("bound.kind", "must be backlog, delay or both (got '" + *s + "')");
        }
    }
    if (!obj.contains("epsilon")) {
        r.problem("bound.epsilon", "missing required field");
    } else {
        const json& e = obj.at("epsilon");
        std::vector<json> items = e.is_array() ? std::vector<json>(e.begin(), e.end()) : std::vector<json>{e};
        b.epsilons.clear();
        if (items.empty()) {
            r.problem("bound.epsilon", "list must be nonempty");
        }
        for (std::size_t i = 0; i < items.size(); ++i) {
            const std::string where = "bound.epsilon[" + std::to_string(i) + "]";
            if (!items[i].is_number()) {
                r.problem(where, "must be a number");
                continue;
            }
            const double eps = items[i].get<double>();
            if (!(eps > 0.0 && eps <= 1.0)) {
                r.problem(where, "must lie in the interval (0, 1]");
                continue;
            }
            b.epsilons.push_back(eps);
        }
    }
    if (obj.contains("horizon")) {
        const json& h = obj.at("horizon");
        if (h.is_string() && h.get<std::string>() == "infinite") {
            b.horizon = Horizon::infinite();
        } else if (auto c = r.count(h, "bound.horizon")) {
            if (*c < 1) {
                r.problem("bound.horizon", "must be at least 1 slot or \"infinite\"");
            } else {
                b.horizon = Horizon::finite(static_cast<std::int64_t>(*c));
            }
        }
    }
    if (const json* ts = r.object(obj, "theta_search", "bound.theta_search", false)) {
        const std::string p = "bound.theta_search";
        r.allowed_keys(*ts, p, {"theta_min", "theta_max", "coarse_grid_points", "refine_tolerance"});
        b.theta_search.theta_min = r.number(*ts, "theta_min", p, false);
        b.theta_search.theta_max = r.number(*ts, "theta_max", p, false);
        require_positive(r, b.theta_search.theta_min, p + ".theta_min");
        require_positive(r, b.theta_search.theta_max, p + ".theta_max");
        if (b.theta_search.theta_min && b.theta_search.theta_max &&
            !(*b.theta_search.theta_min < *b.theta_search.theta_max)) {
            r.problem(p, "theta_min must be below theta_max");
        }
        if (auto g = r.count(*ts, "coarse_grid_points", p, false)) {
            if (*g < 8 || *g > 1'000'000) {
                r.problem(p + ".coarse_grid_points", "must lie in [8, 1000000]");
            } else {
                b.theta_search.coarse_grid_points = static_cast<int>(*g);
            }
        }
        b.theta_search.refine_tolerance = r.number(*ts, "refine_tolerance", p, false);
        require_positive(r, b.theta_search.refine_tolerance, p + ".refine_tolerance");
    }
    return b;
}

SimBlock read_sim(Reader& r, const json& obj)
{
    SimBlock s;
    r.allowed_keys(obj, "sim", {"warmup_slots", "measure_slots", "replications", "seed", "max_backlog_slots", "slack"});
    if (auto v = r.count(obj, "warmup_slots", "sim", false)) {
        s.warmup_slots = static_cast<std::int64_t>(*v);
    }
    if (auto v = r.count(obj, "measure_slots", "sim", true)) {
        if (*v < 1) {
            r.problem("sim.measure_slots", "must be at least 1");
        }
        s.measure_slots = static_cast<std::int64_t>(*v);
    }
    if (auto v = r.count(obj, "replications", "sim", false)) {
        if (*v < 1 || *v > 100000) {
            r.problem("sim.replications", "must lie in [1, 100000]");
        }
        s.replications = static_cast<int>(*v);
    }
    if (auto v = r.count(obj, "seed", "sim", false)) {
        s.seed = *v;
    }
    if (auto v = r.number(obj, "max_backlog_slots", "sim", false)) {
        require_positive(r, v, "sim.max_backlog_slots");
        s.max_backlog_slots = *v;
    }
    if (auto v = r.number(obj, "slack", "sim", false)) {
        if (*v < 0.0) {
            r.problem("sim.slack", "must be nonnegative");
        }
        s.slack = *v;
    }
    return s;
}

std::string line_column(std::string_view text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

} // namespace

Scenario parse_scenario(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        throw ScenarioError("scenario parse error at " + line_column(text, byte) + ": " + e.what());
    }
    if (!doc.is_object()) {
        throw ScenarioError("scenario document must be a JSON object");
    }

    Reader r;
    Scenario s;
    r.allowed_keys(doc, "", {"scenario_id", "units", "traffic", "network", "bound", "sim"});
    if (auto id = r.string(doc, "scenario_id", "", false)) {
        s.id = *id;
    }
    if (const json* u = r.object(doc, "units", "units", true)) {
        s.units = read_units(r, *u);
    }
    if (const json* t = r.object(doc, "traffic", "traffic", true)) {
        s.traffic = read_traffic(r, *t);
    }
    if (const json* n = r.object(doc, "network", "network", true)) {
        s.network = read_network(r, *n);
    }
    if (const json* b = r.object(doc, "bound", "bound", false)) {
        s.bound = read_bound(r, *b);
    }
    if (const json* sm = r.object(doc, "sim", "sim", false)) {
        s.sim = read_sim(r, *sm);
    }

    if (r.problems.empty()) {
        check_convertible(r, s.capacity_bits_per_slot(), "network.capacity");
        check_convertible(r, to_bits_per_slot(s.traffic.peak_rate, s.units.rate_unit, s.units.slot_length_s),
                          "traffic.peak_rate");
        const double slots_on = s.traffic.mean_on_s / s.units.slot_length_s;
        const double slots_off = s.traffic.mean_off_s / s.units.slot_length_s;
        if (!std::isfinite(slots_on) || !std::isfinite(slots_off) || slots_on > 9.0e18 || slots_off > 9.0e18) {
            r.problem("traffic", "on/off durations overflow when converted to slots");
        }
    }

    if (!r.problems.empty()) {
        std::ostringstream msg;
        msg << "invalid scenario (" << r.problems.size() << " problem" << (r.problems.size() == 1 ? "" : "s")
            << "):";
        for (const auto& p : r.problems) {
            msg << "\n  " << p;
        }
        throw ScenarioError(msg.str());
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ScenarioError("cannot open scenario file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario(buf.str());
    } catch (const ScenarioError& e) {
        throw ScenarioError(path.string() + ": " + e.what());
    }
}

std::string serialize_scenario(const Scenario& s)
{
    json doc;
    doc["scenario_id"] = s.id;
    doc["units"] = {{"slot_length_s", s.units.slot_length_s}, {"rate_unit", to_string(s.units.rate_unit)}};
    doc["traffic"] = {{"peak_rate", s.traffic.peak_rate},
                      {"mean_on_s", s.traffic.mean_on_s},
                      {"mean_off_s", s.traffic.mean_off_s},
                      {"through_flows", s.traffic.through_flows},
                      {"cross_flows", s.traffic.cross_flows}};
    json network = {{"capacity", s.network.capacity}, {"hops", s.network.hops}};
    if (!s.network.flow_totals.empty()) {
        network["flow_totals"] = s.network.flow_totals;
    }
    if (!s.network.flow_pairs.empty()) {
        json pairs = json::array();
        for (const FlowPoint& p : s.network.flow_pairs) {
            pairs.push_back({p.through, p.cross});
        }
        network["flow_pairs"] = pairs;
    }
    doc["network"] = network;
    if (s.bound) {
        json bound = {{"kind", to_string(s.bound->kind)}, {"epsilon", s.bound->epsilons}};
        if (s.bound->horizon.is_infinite()) {
            bound["horizon"] = "infinite";
        } else {
            bound["horizon"] = s.bound->horizon.slots();
        }
        const ThetaOverrides& o = s.bound->theta_search;
        json ts = json::object();
        if (o.theta_min) {
            ts["theta_min"] = *o.theta_min;
        }
        if (o.theta_max) {
            ts["theta_max"] = *o.theta_max;
        }
        if (o.coarse_grid_points) {
            ts["coarse_grid_points"] = *o.coarse_grid_points;
        }
        if (o.refine_tolerance) {
            ts["refine_tolerance"] = *o.refine_tolerance;
        }
        if (!ts.empty()) {
            bound["theta_search"] = ts;
        }
        doc["bound"] = bound;
    }
    if (s.sim) {
        json sim = {{"measure_slots", s.sim->measure_slots},
                    {"replications", s.sim->replications},
                    {"seed", s.sim->seed},
                    {"max_backlog_slots", s.sim->max_backlog_slots},
                    {"slack", s.sim->slack}};
        if (s.sim->warmup_slots) {
            sim["warmup_slots"] = *s.sim->warmup_slots;
        }
        doc["sim"] = sim;
    }
    return doc.dump(2) + "\n";
}

} // namespace snc
