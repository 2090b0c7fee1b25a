#include <doctest.h>

#include "generators.hpp"
#include "snc/simulator.hpp"

using namespace snc;

namespace {

SimScenario random_scenario(gen::Source& g)
{
    SimScenario s;
    s.hops = static_cast<int>(g.integer(1, 4));
    s.through_count = static_cast<std::uint64_t>(g.integer(1, 8));
    s.cross_count = static_cast<std::uint64_t>(g.integer(0, 8));
    s.source = MmooParams{static_cast<double>(g.integer(1, 200)), g.log_uniform(1e-3, 0.5), g.log_uniform(1e-3, 0.5)};
    const double load = static_cast<double>(s.through_count + s.cross_count) * mmoo_mean_rate(s.source);
    s.capacity_bits_per_slot = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(load / g.uniform(0.2, 0.95))));
    s.warmup_slots = g.integer(0, 200);
    s.measure_slots = g.integer(1, 1500);
    s.replications = static_cast<int>(g.integer(1, 3));
    s.base_seed = static_cast<std::uint64_t>(g.integer(0, 1 << 30));
    s.max_backlog_slots = 1e9;
    s.audit = true;
    return s;
}

std::uint64_t count_zero(const Histogram& h)
{
    return h.total() - h.count_above(0.0);
}

} // namespace

TEST_CASE("simulator conservation laws, sample accounting and reproducibility")
{
    gen::Source g(707);
    for (int i = 0; i < gen::kCases; ++i) {
        const SimScenario s = random_scenario(g);
        CAPTURE(i);
        SimResult r;
        // audit mode checks causality, work conservation and flow conservation at every hop and slot
        REQUIRE_NOTHROW(r = simulate_tandem(s, 1));
        const auto expected = static_cast<std::uint64_t>(s.measure_slots) * static_cast<std::uint64_t>(s.replications);
        CHECK(r.delay_samples.total() == expected);
        CHECK(r.backlog_samples.total() == expected);
        // zero backlog and zero virtual delay describe the same slots
        CHECK(count_zero(r.delay_samples) == count_zero(r.backlog_samples));

        SimScenario again = s;
        again.audit = false;
        const SimResult r2 = simulate_tandem(again, 2);
        CHECK(r2.delay_samples == r.delay_samples);
        CHECK(r2.backlog_samples == r.backlog_samples);
    }
}

TEST_CASE("without cross traffic a tandem of equal servers behaves like its first hop")
{
    gen::Source g(808);
    for (int i = 0; i < gen::kCases; ++i) {
        SimScenario s = random_scenario(g);
        s.cross_count = 0;
        const double load = static_cast<double>(s.through_count) * mmoo_mean_rate(s.source);
        s.capacity_bits_per_slot =
            std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(load / g.uniform(0.2, 0.95))));
        SimScenario one = s;
        one.hops = 1;
        const SimResult a = simulate_tandem(s);
        const SimResult b = simulate_tandem(one);
        CHECK(a.backlog_samples == b.backlog_samples);
        CHECK(a.delay_samples == b.delay_samples);
    }
}
