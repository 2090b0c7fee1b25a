// commands.cpp - Orchestration of bounds, sweeps, simulation and validation into result rows.

#include "snc/commands.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "snc/errors.hpp"
#include "snc/statistics.hpp"

#ifndef SNC_PRESET_DIR_DEFAULT
#define SNC_PRESET_DIR_DEFAULT "presets"
#endif

namespace snc {

Scenario Overrides::apply(const Scenario& scenario) const
{
    Scenario s = scenario;
    if (epsilons) {
        if (!s.bound) {
            s.bound = BoundBlock{};
        }
        for (double eps : *epsilons) {
            if (!(eps > 0.0 && eps <= 1.0)) {
                throw ScenarioError("--epsilon values must lie in (0, 1]");
            }
        }
        s.bound->epsilons = *epsilons;
    }
    if (hops) {
        for (int h : *hops) {
            if (h < 1) {
                throw ScenarioError("--hops values must be at least 1");
            }
        }
        s.network.hops = *hops;
    }
    if (through) {
        if (*through < 1) {
            throw ScenarioError("--through must be at least 1");
        }
        s.traffic.through_flows = *through;
    }
    if (cross) {
        s.traffic.cross_flows = *cross;
    }
    if (seed && s.sim) {
        s.sim->seed = *seed;
    }
    return s;
}

namespace {

// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first failure in index order.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn)
{
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto threads = static_cast<std::size_t>(std::max(1, jobs));
    if (threads == 1 || n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(threads, n); ++t) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

std::vector<BoundKind> kinds_of(KindSelection sel)
{
    switch (sel) {
    case KindSelection::backlog:
        return {BoundKind::backlog};
    case KindSelection::delay:
        return {BoundKind::delay};
    case KindSelection::both:
        return {BoundKind::backlog, BoundKind::delay};
    }
    return {BoundKind::delay};
}

const BoundBlock& require_bound(const Scenario& s)
{
    if (!s.bound) {
        throw ScenarioError("scenario '" + s.id + "' has no bound block");
    }
    return *s.bound;
}

BoundResult compute_bound(const Scenario& s, int hops, std::uint64_t through, std::uint64_t cross, double epsilon,
                          BoundKind kind)
{
    const BoundBlock& b = require_bound(s);
    const HomogeneousNetwork net = s.network_at(hops, through, cross);
    const NetworkPath path = net.path();
    const ThetaSearchConfig search = s.theta_search(path);
    if (b.horizon.is_infinite()) {
        return kind == BoundKind::backlog ? closed_form_backlog(net, epsilon, search)
                                          : closed_form_delay(net, epsilon, search);
    }
    return kind == BoundKind::backlog ? backlog_bound(path, epsilon, b.horizon, search)
                                      : delay_bound(path, epsilon, b.horizon, search);
}

struct Task {
    int hops;
    std::uint64_t through;
    std::uint64_t cross;
    double epsilon;
    BoundKind kind;
};

ResultRow row_for(const Scenario& s, const Task& t)
{
    ResultRow row;
    row.scenario_id = s.id;
    row.kind = to_string(t.kind);
    row.hops = t.hops;
    row.through = t.through;
    row.cross = t.cross;
    row.epsilon = t.epsilon;
    row.bound_unit = t.kind == BoundKind::delay ? "s" : "bit";
    return row;
}

void fill_bound(ResultRow& row, const Scenario& s, const BoundResult& r)
{
    row.theta_star = r.theta_star;
    row.bound_value = r.kind == BoundKind::delay ? s.slots_to_seconds(r.value) : r.value;
    row.stable = r.stable_at_theta_star;
}

std::string instability_message(const Task& t, const std::string& detail)
{
    std::ostringstream msg;
    msg << "H=" << t.hops << " N=" << t.through << " M=" << t.cross << " epsilon=" << t.epsilon
        << ": unstable, the condition C >= N*alpha(theta) + M*alpha_c(theta) cannot hold with a strictly "
           "positive margin (" << detail << ")";
    return msg.str();
}

CommandOutput run_bound_tasks(const Scenario& s, const std::vector<Task>& tasks, int jobs, bool unstable_is_error)
{
    CommandOutput out;
    std::vector<ResultRow> rows(tasks.size());
    std::vector<std::string> failures(tasks.size());
    parallel_for(tasks.size(), jobs, [&](std::size_t i) {
        rows[i] = row_for(s, tasks[i]);
        try {
            fill_bound(rows[i], s, compute_bound(s, tasks[i].hops, tasks[i].through, tasks[i].cross,
                                                 tasks[i].epsilon, tasks[i].kind));
        } catch (const InstabilityError& e) {
            rows[i].stable = false;
            rows[i].bound_value = std::numeric_limits<double>::infinity();
            failures[i] = instability_message(tasks[i], e.what());
        } catch (const HorizonTooSmallError& e) {
            rows[i].bound_value = std::numeric_limits<double>::infinity();
            failures[i] = e.what();
        }
    });
    out.rows = std::move(rows);
    for (const auto& f : failures) {
        if (!f.empty()) {
            out.messages.push_back(f);
            if (unstable_is_error) {
                out.exit_code = exit_code::instability;
            }
        }
    }
    return out;
}

std::vector<Task> hop_tasks(const Scenario& s)
{
    const BoundBlock& b = require_bound(s);
    std::vector<Task> tasks;
    for (int h : s.network.hops) {
        for (double eps : b.epsilons) {
            for (BoundKind k : kinds_of(b.kind)) {
                tasks.push_back({h, s.traffic.through_flows, s.traffic.cross_flows, eps, k});
            }
        }
    }
    return tasks;
}

} // namespace

CommandOutput cmd_bound(const Scenario& scenario, const Overrides& overrides)
{
    const Scenario s = overrides.apply(scenario);
    return run_bound_tasks(s, hop_tasks(s), overrides.jobs, true);
}

CommandOutput cmd_sweep_hops(const Scenario& scenario, const Overrides& overrides)
{
    const Scenario s = overrides.apply(scenario);
    if (s.network.hops.empty()) {
        throw ScenarioError("sweep-hops needs a nonempty network.hops list");
    }
    return run_bound_tasks(s, hop_tasks(s), overrides.jobs, true);
}

CommandOutput cmd_sweep_flows(const Scenario& scenario, const Overrides& overrides)
{
    const Scenario s = overrides.apply(scenario);
    const BoundBlock& b = require_bound(s);
    const std::vector<FlowPoint> points = s.network.flow_sweep();
    if (points.empty()) {
        throw ScenarioError("sweep-flows needs network.flow_totals or network.flow_pairs");
    }
    std::vector<Task> tasks;
    for (int h : s.network.hops) {
        for (const FlowPoint& p : points) {
            for (double eps : b.epsilons) {
                for (BoundKind k : kinds_of(b.kind)) {
                    tasks.push_back({h, p.through, p.cross, eps, k});
                }
            }
        }
    }
    return run_bound_tasks(s, tasks, overrides.jobs, false);
}

CommandOutput cmd_simulate(const Scenario& scenario, const Overrides& overrides)
{
    const Scenario s = overrides.apply(scenario);
    const std::vector<double> epsilons = s.bound ? s.bound->epsilons : std::vector<double>{1e-2};
    CommandOutput out;
    for (int h : s.network.hops) {
        SimResult sim;
        try {
            sim = simulate_tandem(s.sim_scenario(h, s.traffic.through_flows, s.traffic.cross_flows), overrides.jobs);
        } catch (const InstabilityError& e) {
            out.messages.push_back("H=" + std::to_string(h) + ": " + e.what());
            out.exit_code = exit_code::instability;
            continue;
        }
        for (double eps : epsilons) {
            for (BoundKind k : {BoundKind::delay, BoundKind::backlog}) {
                const Histogram& samples = k == BoundKind::delay ? sim.delay_samples : sim.backlog_samples;
                ResultRow row = row_for(s, {h, s.traffic.through_flows, s.traffic.cross_flows, eps, k});
                row.kind = k == BoundKind::delay ? "empirical_delay" : "empirical_backlog";
                const auto q = static_cast<double>(samples.upper_quantile(eps));
                const TailEstimate tail = empirical_tail(samples, q);
                row.bound_value = k == BoundKind::delay ? s.slots_to_seconds(q) : q;
                row.empirical_frequency = tail.frequency;
                row.confidence_limit = tail.upper_limit;
                out.rows.push_back(row);
            }
        }
    }
    return out;
}

CommandOutput cmd_validate(const Scenario& scenario, const Overrides& overrides)
{
    const Scenario s = overrides.apply(scenario);
    const BoundBlock& b = require_bound(s);
    if (!s.sim) {
        throw ScenarioError("validate needs a sim block");
    }
    CommandOutput out;
    bool any_fail = false;
    bool any_pass = false;
    for (int h : s.network.hops) {
        const std::uint64_t n = s.traffic.through_flows;
        const std::uint64_t m = s.traffic.cross_flows;
        SimResult sim;
        try {
            sim = simulate_tandem(s.sim_scenario(h, n, m), overrides.jobs);
        } catch (const InstabilityError& e) {
            out.messages.push_back("H=" + std::to_string(h) + ": " + e.what());
            out.exit_code = exit_code::instability;
            return out;
        }
        for (double eps : b.epsilons) {
            for (BoundKind k : kinds_of(b.kind)) {
                const Task task{h, n, m, eps, k};
                ResultRow row = row_for(s, task);
                BoundResult bound;
                try {
                    bound = compute_bound(s, h, n, m, eps, k);
                } catch (const InstabilityError& e) {
                    out.messages.push_back(instability_message(task, e.what()));
                    out.exit_code = exit_code::instability;
                    return out;
                }
                if (overrides.self_test) {
                    bound.value *= overrides.self_test_scale;
                }
                const ValidationReport report = validate_bound(sim, bound, eps, s.sim->slack);
                fill_bound(row, s, bound);
                row.empirical_frequency = report.tail.frequency;
                row.confidence_limit = report.tail.upper_limit;
                out.rows.push_back(row);

                std::ostringstream msg;
                msg << "H=" << h << " " << to_string(k) << " epsilon=" << eps << " threshold=" << bound.value
                    << (k == BoundKind::delay ? " slots" : " bits") << " frequency=" << report.tail.frequency
                    << " upper95=" << report.tail.upper_limit << " -> " << to_string(report.verdict);
                if (!report.warning.empty()) {
                    msg << " (" << report.warning << ")";
                }
                out.messages.push_back(msg.str());
                any_fail = any_fail || report.verdict == Verdict::fail;
                any_pass = any_pass || report.verdict == Verdict::pass;
            }
        }
    }
    if (overrides.self_test) {
        // The corrupted bounds must be caught; a pass means the harness is insensitive.
        if (any_pass) {
            out.messages.push_back("self-test: a bound scaled by " + std::to_string(overrides.self_test_scale) +
                                   " still passed; the harness did not detect the corruption");
            out.exit_code = exit_code::validation_failure;
        } else {
            out.messages.push_back(any_fail ? "self-test: corrupted bounds detected"
                                            : "self-test: inconclusive, sample budget too small");
        }
        return out;
    }
    if (any_fail) {
        out.exit_code = exit_code::validation_failure;
    }
    return out;
}

std::filesystem::path resolve_scenario_path(const std::string& name_or_path)
{
    namespace fs = std::filesystem;
    if (fs::is_regular_file(name_or_path)) {
        return name_or_path;
    }
    std::vector<fs::path> dirs;
    if (const char* env = std::getenv("SNC_PRESET_DIR"); env && *env) {
        dirs.emplace_back(env);
    }
    dirs.emplace_back(SNC_PRESET_DIR_DEFAULT);
    for (const fs::path& dir : dirs) {
        for (const fs::path& candidate : {dir / name_or_path, dir / (name_or_path + ".json")}) {
            if (fs::is_regular_file(candidate)) {
                return candidate;
            }
        }
    }
    throw ScenarioError("scenario '" + name_or_path + "' is neither a file nor a known preset");
}

} // namespace snc
