#include <doctest.h>

#include <cmath>
#include <string>

#include "snc/commands.hpp"
#include "snc/scenario.hpp"

using namespace snc;

namespace {

Scenario preset(const char* name)
{
    return load_scenario(std::string(SNC_TEST_PRESET_DIR) + "/" + name + ".json");
}

} // namespace

TEST_CASE("cmd_bound")
{
    const Scenario fig3 = preset("voice-fig3");
    Overrides o;
    o.hops = std::vector<int>{1};
    const CommandOutput out = cmd_bound(fig3, o);
    CHECK(out.exit_code == exit_code::success);
    REQUIRE(out.rows.size() == 1);
    const ResultRow& r = out.rows[0];
    CHECK(r.kind == "delay");
    CHECK(r.bound_unit == "s");
    CHECK(r.stable);
    CHECK(r.theta_star.value() > 0.0);
    CHECK(r.bound_value.value() > 0.0);
    CHECK(std::isfinite(r.bound_value.value()));

    SUBCASE("epsilon one")
    {
        o.epsilons = std::vector<double>{1.0};
        const CommandOutput one = cmd_bound(fig3, o);
        CHECK(one.rows.at(0).bound_value.value() == 0.0);
    }
    SUBCASE("overload")
    {
        o.through = 3000;
        const CommandOutput bad = cmd_bound(fig3, o);
        CHECK(bad.exit_code == exit_code::instability);
        REQUIRE_FALSE(bad.messages.empty());
        CHECK(bad.messages.front().find("stab") != std::string::npos);
    }
    SUBCASE("both kinds over two epsilons")
    {
        Scenario s = fig3;
        s.bound->kind = KindSelection::both;
        o.epsilons = std::vector<double>{1e-3, 1e-6};
        const CommandOutput both = cmd_bound(s, o);
        REQUIRE(both.rows.size() == 4);
        CHECK(both.rows[0].bound_unit != both.rows[1].bound_unit);
    }
}

TEST_CASE("cmd_sweep_hops")
{
    const Scenario fig3 = preset("voice-fig3");
    Overrides o;
    o.hops = std::vector<int>{1, 2, 5, 10};
    const CommandOutput out = cmd_sweep_hops(fig3, o);
    REQUIRE(out.rows.size() == 4);
    const double d1 = out.rows[0].bound_value.value();
    for (const ResultRow& r : out.rows) {
        CHECK(r.bound_value.value() == doctest::Approx(r.hops * d1).epsilon(1e-9));
        CHECK(r.theta_star == out.rows[0].theta_star);
    }

    o.hops = std::vector<int>{7};
    const CommandOutput single = cmd_sweep_hops(fig3, o);
    const CommandOutput bound = cmd_bound(fig3, o);
    REQUIRE(single.rows.size() == 1);
    CHECK(single.rows[0].bound_value == bound.rows[0].bound_value);
    CHECK(single.rows[0].theta_star == bound.rows[0].theta_star);
}

TEST_CASE("cmd_sweep_flows")
{
    const Scenario fig4 = preset("voice-fig4-H10");
    const CommandOutput out = cmd_sweep_flows(fig4, Overrides{});
    CHECK(out.exit_code == exit_code::success);
    REQUIRE(out.rows.size() == fig4.network.flow_sweep().size());
    double previous = 0.0;
    bool seen_unstable = false;
    for (const ResultRow& r : out.rows) {
        CHECK(r.through == r.cross);
        if (r.stable) {
            CHECK_FALSE(seen_unstable);
            CHECK(r.bound_value.value() >= previous);
            previous = r.bound_value.value();
        } else {
            seen_unstable = true;
        }
    }
    // 100 Mbit/s / 25.6 kbit/s = 3906.25 flows: the last point (4000) is past the boundary
    CHECK_FALSE(out.rows.back().stable);
    CHECK(out.rows[out.rows.size() - 3].stable);

    SUBCASE("exactly at utilization one")
    {
        Scenario s = fig4;
        s.traffic.peak_rate = 100.0; // kbit/s, mean 40 kbit/s; 2500 flows fill 100 Mbit/s exactly
        s.network.flow_totals = {2500};
        const CommandOutput edge = cmd_sweep_flows(s, Overrides{});
        REQUIRE(edge.rows.size() == 1);
        CHECK_FALSE(edge.rows[0].stable);
    }
}

TEST_CASE("cmd_simulate and cmd_validate at reduced scale")
{
    Scenario desk = preset("desk-validation");
    desk.sim->measure_slots = 100000;
    desk.sim->replications = 2;
    Overrides o;
    o.jobs = 2;

    const CommandOutput sim = cmd_simulate(desk, o);
    CHECK(sim.exit_code == exit_code::success);
    REQUIRE(sim.rows.size() == 4);
    CHECK(sim.rows[0].kind.rfind("empirical_", 0) == 0);

    const CommandOutput val = cmd_validate(desk, o);
    CHECK(val.exit_code == exit_code::success);
    REQUIRE(val.rows.size() == 4);
    for (const ResultRow& r : val.rows) {
        CHECK(r.confidence_limit.value() <= r.epsilon);
    }

    SUBCASE("tiny epsilon is inconclusive, not a failure")
    {
        o.epsilons = std::vector<double>{1e-9};
        const CommandOutput tiny = cmd_validate(desk, o);
        CHECK(tiny.exit_code == exit_code::success);
        CHECK_FALSE(tiny.messages.empty());
    }
    SUBCASE("self-test detects a bound corrupted far enough to matter")
    {
        o.self_test = true;
        o.self_test_scale = 0.01;
        CHECK(cmd_validate(desk, o).exit_code == exit_code::success);
    }
    SUBCASE("reproducible")
    {
        const CommandOutput again = cmd_simulate(desk, o);
        CHECK(again.rows.at(0).bound_value == sim.rows.at(0).bound_value);
        CHECK(again.rows.at(3).bound_value == sim.rows.at(3).bound_value);
    }
}
