#include <doctest.h>

#include <cmath>

#include "snc/bounds.hpp"
#include "snc/errors.hpp"
#include "snc/rng.hpp"
#include "snc/simulator.hpp"

using namespace snc;

namespace {

SimScenario desk(int hops)
{
    SimScenario s;
    s.hops = hops;
    s.capacity_bits_per_slot = 731;
    s.through_count = 10;
    s.cross_count = 10;
    s.source = MmooParams::from_seconds(64e3, 0.4, 0.6, 1e-3);
    s.warmup_slots = 6000;
    s.measure_slots = 200000;
    s.replications = 2;
    s.base_seed = 11;
    return s;
}

} // namespace

TEST_CASE("mmoo_source_step")
{
    SUBCASE("absorbing on state")
    {
        const MmooChain chain(MmooParams{8.0, 0.0, 1.0});
        CounterRng rng(1);
        SourceState s = SourceState::on;
        for (int i = 0; i < 10000; ++i) {
            const SourceStep step = mmoo_source_step(s, rng, chain);
            CHECK(step.next == SourceState::on);
            CHECK(step.emitted_bits == 8.0);
            s = step.next;
        }
    }
    SUBCASE("symmetric chain spends half the slots on")
    {
        const MmooChain chain(MmooParams{1.0, 0.05, 0.05});
        CounterRng rng(CounterRng::derive(3, {0}));
        SourceState s = chain.stationary_state(rng);
        const int n = 1000000;
        long on = 0;
        for (int i = 0; i < n; ++i) {
            const SourceStep step = mmoo_source_step(s, rng, chain);
            on += step.emitted_bits > 0 ? 1 : 0;
            s = step.next;
        }
        // correlated samples: the effective sample size shrinks by (1+rho)/(1-rho), rho = 1 - 2p
        const double p = chain.leave_on_probability();
        const double inflation = (2.0 - 2.0 * p) / (2.0 * p);
        const double sigma = std::sqrt(0.25 / n * inflation);
        CHECK(std::abs(static_cast<double>(on) / n - 0.5) < 3.0 * sigma);
    }
    SUBCASE("voice source mean rate over 10^7-slot paths")
    {
        // One path has a relative standard error near 0.85% (correlation time 240 slots), so ten
        // independent paths are pooled to make the 1% band a 3.7 sigma check.
        const MmooChain chain(MmooParams::from_seconds(64e3, 0.4, 0.6, 1e-3));
        CHECK(chain.leave_on_probability() == doctest::Approx(-std::expm1(-1.0 / 400.0)));
        const int n = 10000000;
        double bits = 0.0;
        for (std::uint64_t path = 0; path < 10; ++path) {
            CounterRng rng(CounterRng::derive(5, {path}));
            SourceState s = chain.stationary_state(rng);
            for (int i = 0; i < n; ++i) {
                const SourceStep step = mmoo_source_step(s, rng, chain);
                bits += step.emitted_bits;
                s = step.next;
            }
        }
        CHECK(bits / (10.0 * n) / 1e-3 == doctest::Approx(25.6e3).epsilon(0.01));
    }
}

TEST_CASE("under-loaded deterministic flow sees no delay")
{
    SimScenario s;
    s.hops = 3;
    s.capacity_bits_per_slot = 10;
    s.through_count = 1;
    s.cross_count = 0;
    s.source = MmooParams{7.0, 0.0, 1.0};
    s.warmup_slots = 1;
    s.measure_slots = 5000;
    s.audit = true;
    const SimResult r = simulate_tandem(s);
    CHECK(r.sample_count() == 5000);
    CHECK(r.delay_samples.max_value() == 0);
    CHECK(r.backlog_samples.max_value() <= 7);
}

TEST_CASE("overload is rejected")
{
    SimScenario s = desk(1);
    s.through_count = 20;
    s.cross_count = 20;
    CHECK(s.utilization() > 1.0);
    CHECK_THROWS_AS(simulate_tandem(s), InstabilityError);

    SimScenario slow = desk(1);
    slow.capacity_bits_per_slot = 520; // utilization 0.985: stable on average, guard trips first
    slow.max_backlog_slots = 2.0;
    slow.measure_slots = 100000;
    CHECK_THROWS_AS(simulate_tandem(slow), InstabilityError);
}

TEST_CASE("scenario validation")
{
    SimScenario s = desk(1);
    s.hops = 0;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s = desk(1);
    s.measure_slots = 0;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s = desk(1);
    s.source.peak_bits_per_slot = 63.5;
    CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("audited run on the desk scenario")
{
    SimScenario s = desk(2);
    s.audit = true;
    s.measure_slots = 50000;
    SimResult r;
    CHECK_NOTHROW(r = simulate_tandem(s, 2));
    CHECK(r.sample_count() == 100000);
    CHECK(r.replication_seeds.size() == 2);
}

TEST_CASE("reproducibility and job-count independence")
{
    SimScenario s = desk(2);
    s.measure_slots = 30000;
    s.replications = 3;
    const SimResult a = simulate_tandem(s, 1);
    const SimResult b = simulate_tandem(s, 3);
    CHECK(a.delay_samples == b.delay_samples);
    CHECK(a.backlog_samples == b.backlog_samples);
    CHECK(a.replication_seeds == b.replication_seeds);
    s.base_seed = 12;
    CHECK_FALSE(simulate_tandem(s, 1).backlog_samples == a.backlog_samples);
}

TEST_CASE("analytic bounds dominate the simulated tails")
{
    for (int h : {1, 2}) {
        const SimScenario s = desk(h);
        const SimResult sim = simulate_tandem(s, 2);
        const NetworkPath path = s.path();
        const ThetaSearchConfig search = default_theta_search(path);
        for (double eps : {1e-1, 1e-2}) {
            const ValidationReport d = validate_bound(sim, delay_bound(path, eps, Horizon::infinite(), search), eps);
            CHECK(d.verdict == Verdict::pass);
            const ValidationReport b =
                validate_bound(sim, backlog_bound(path, eps, Horizon::infinite(), search), eps);
            CHECK(b.verdict == Verdict::pass);
        }
        // at fixed thresholds the analytic tail is above the empirical lower confidence limit
        for (std::int64_t d : {0, 50, 200, 800}) {
            const BoundResult tail = delay_tail_bound(path, d, Horizon::infinite(), search);
            CHECK(tail.violation_probability >= empirical_tail(sim.delay_samples, d).lower_limit);
        }
    }
}

TEST_CASE("validation verdicts")
{
    const SimScenario s = desk(1);
    const SimResult sim = simulate_tandem(s, 2);
    const ThetaSearchConfig search = default_theta_search(s.path());
    BoundResult bound = delay_bound(s.path(), 1e-2, Horizon::infinite(), search);

    const ValidationReport tiny = validate_bound(sim, bound, 1e-9);
    CHECK(tiny.verdict == Verdict::inconclusive);
    CHECK_FALSE(tiny.warning.empty());

    bound.value = 0.0;
    CHECK(validate_bound(sim, bound, 1e-2).verdict == Verdict::fail);
}
