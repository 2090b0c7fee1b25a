// snc_cli.cpp - Command-line front end: bound, sweep-hops, sweep-flows, simulate, validate.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "snc/commands.hpp"
#include "snc/errors.hpp"

namespace {

struct Options {
    std::string scenario;
    std::string out;
    std::vector<double> epsilons;
    std::vector<int> hops;
    std::uint64_t through = 0;
    std::uint64_t cross = 0;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool self_test = false;
    double self_test_scale = 0.5;
    int verbosity = 0;
};

void add_common(CLI::App* cmd, Options& o)
{
    cmd->add_option("--scenario", o.scenario, "Scenario file or preset name (looked up in $SNC_PRESET_DIR)")
        ->required();
    cmd->add_option("--out", o.out, "CSV output path (default: stdout)");
    cmd->add_option("--epsilon", o.epsilons, "Violation probabilities, overriding bound.epsilon")->delimiter(',');
    cmd->add_option("--hops", o.hops, "Hop counts, overriding network.hops")->delimiter(',');
    cmd->add_option("--through", o.through, "Through flows N, overriding traffic.through_flows");
    cmd->add_option("--cross", o.cross, "Cross flows M per hop, overriding traffic.cross_flows");
    cmd->add_option("--seed", o.seed, "Base seed, overriding sim.seed");
    cmd->add_option("--jobs", o.jobs, "Concurrent sweep points / replications")->check(CLI::PositiveNumber);
    cmd->add_flag("-v,--verbose", o.verbosity, "Print diagnostics to stderr (repeatable)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"End-to-end stochastic network calculus bounds and tandem-queue validation"};
    app.require_subcommand(1, 1);

    Options o;
    CLI::App* bound = app.add_subcommand("bound", "Backlog/delay bounds for each H and epsilon");
    CLI::App* sweep_hops = app.add_subcommand("sweep-hops", "Bounds across the hop-count sweep");
    CLI::App* sweep_flows = app.add_subcommand("sweep-flows", "Bounds across the N+M flow sweep");
    CLI::App* simulate = app.add_subcommand("simulate", "Empirical delay/backlog quantiles from simulation");
    CLI::App* validate = app.add_subcommand("validate", "Check analytic bounds against simulation");
    for (CLI::App* cmd : {bound, sweep_hops, sweep_flows, simulate, validate}) {
        add_common(cmd, o);
    }
    validate->add_flag("--self-test", o.self_test, "Scale every bound down and expect the check to fail");
    validate->add_option("--self-test-scale", o.self_test_scale, "Factor applied to bounds in --self-test mode")
        ->check(CLI::Range(0.0, 1.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : snc::exit_code::usage;
    }

    snc::Overrides overrides;
    if (!o.epsilons.empty()) {
        overrides.epsilons = o.epsilons;
    }
    if (!o.hops.empty()) {
        overrides.hops = o.hops;
    }
    CLI::App* active = app.get_subcommands().front();
    if (active->count("--through") > 0) {
        overrides.through = o.through;
    }
    if (active->count("--cross") > 0) {
        overrides.cross = o.cross;
    }
    if (active->count("--seed") > 0) {
        overrides.seed = o.seed;
    }
    overrides.jobs = o.jobs;
    overrides.self_test = o.self_test;
    overrides.self_test_scale = o.self_test_scale;

    snc::CommandOutput result;
    try {
        const snc::Scenario scenario = snc::load_scenario(snc::resolve_scenario_path(o.scenario));
        if (active == bound) {
            result = snc::cmd_bound(scenario, overrides);
        } else if (active == sweep_hops) {
            result = snc::cmd_sweep_hops(scenario, overrides);
        } else if (active == sweep_flows) {
            result = snc::cmd_sweep_flows(scenario, overrides);
        } else if (active == simulate) {
            result = snc::cmd_simulate(scenario, overrides);
        } else {
            result = snc::cmd_validate(scenario, overrides);
        }
    } catch (const snc::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return snc::exit_code::usage;
    } catch (const snc::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return snc::exit_code::usage;
    } catch (const snc::InstabilityError& e) {
        std::cerr << "unstable: " << e.what() << "\n";
        return snc::exit_code::instability;
    }

    for (const std::string& m : result.messages) {
        if (o.verbosity > 0 || result.exit_code != snc::exit_code::success) {
            std::cerr << m << "\n";
        }
    }
    if (!result.rows.empty()) {
        const std::string csv = snc::write_results_csv(result.rows);
        if (o.out.empty()) {
            std::cout << csv;
        } else {
            std::ofstream f(o.out, std::ios::binary);
            if (!f) {
                std::cerr << "error: cannot write " << o.out << "\n";
                return snc::exit_code::usage;
            }
            f << csv;
        }
    }
    return result.exit_code;
}
