// simulator.hpp - Discrete-time tandem of FIFO constant-rate hops fed by MMOO sources.
//
// N through sources enter at hop 1 and traverse all H hops; at every hop M fresh cross sources
// share the FIFO and leave after that hop. Traffic is fluid in integer bits per slot.

#ifndef SNC_SIMULATOR_HPP
#define SNC_SIMULATOR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "snc/bounds.hpp"
#include "snc/envelope_models.hpp"
#include "snc/rng.hpp"
#include "snc/statistics.hpp"

namespace snc {

enum class SourceState : std::uint8_t { off, on };

// Per-slot transition probabilities of the discretized on-off chain:
// p(on->off) = 1 - e^{-r10}, p(off->on) = 1 - e^{-r01}, rates in 1/slot.
class MmooChain {
public:
    explicit MmooChain(const MmooParams& params);

    const MmooParams& params() const { return _params; }
    double leave_on_probability() const { return _leave_on; }
    double leave_off_probability() const { return _leave_off; }

    // Draws on with probability r01/(r10+r01).
    SourceState stationary_state(CounterRng& rng) const;
    bool leaves(SourceState state, CounterRng& rng) const;

private:
    MmooParams _params;
    double _leave_on;
    double _leave_off;
    std::uint64_t _leave_on_threshold;
    std::uint64_t _leave_off_threshold;
    bool _leave_on_always;
    bool _leave_off_always;
};

struct SourceStep {
    SourceState next = SourceState::off;
    double emitted_bits = 0.0;
};

// One slot of an MMOO source: emits P bits iff on at slot start, then transitions.
SourceStep mmoo_source_step(SourceState state, CounterRng& rng, const MmooChain& chain);

struct SimScenario {
    int hops = 1;
    std::int64_t capacity_bits_per_slot = 0;
    std::uint64_t through_count = 1;
    std::uint64_t cross_count = 0;
    MmooParams source; // per-slot form; peak must be a whole number of bits
    std::int64_t warmup_slots = 0;
    std::int64_t measure_slots = 1;
    int replications = 1;
    std::uint64_t base_seed = 1;
    // Abort when a hop queue exceeds capacity * max_backlog_slots bits.
    double max_backlog_slots = 1e6;
    // Check causality, work conservation and flow conservation every slot (throws std::logic_error).
    bool audit = false;

    // Throws DomainError on invalid fields and InstabilityError when mean utilization exceeds 1.
    void validate() const;
    double utilization() const;
    std::int64_t peak_bits() const;

    // Analytic counterpart: Aggregate(N, MMOO) over H Leftover(C, M, MMOO) hops.
    NetworkPath path() const;
};

struct SimResult {
    Histogram delay_samples;   // virtual delay inf{d >= 0 : A(t-d) <= D(t)}, slots
    Histogram backlog_samples; // A(t) - D(t), bits
    std::vector<std::uint64_t> replication_seeds;
    std::int64_t slots_per_replication = 0;

    std::uint64_t sample_count() const { return delay_samples.total(); }
    void merge(const SimResult& other);
};

// Runs one replication (index in [0, replications)).
SimResult simulate_replication(const SimScenario& scenario, int replication);

// Runs every replication, up to `jobs` at a time, and merges them in replication order.
SimResult simulate_tandem(const SimScenario& scenario, int jobs = 1);

enum class Verdict { pass, fail, inconclusive };
const char* to_string(Verdict v);

struct ValidationReport {
    BoundKind kind = BoundKind::delay;
    double threshold = 0.0; // bound value in slots or bits
    double epsilon = 0.0;
    TailEstimate tail;
    Verdict verdict = Verdict::inconclusive;
    std::string warning;
};

// Compares the empirical tail at the bound threshold with epsilon. Passes when the one-sided
// upper confidence limit is <= epsilon * (1 + slack); inconclusive when epsilon * samples < 100.
ValidationReport validate_bound(const SimResult& sim, const BoundResult& bound, double epsilon, double slack = 0.0);
ValidationReport validate_bound(const SimScenario& scenario, const BoundResult& bound, double epsilon,
                                double slack = 0.0, int jobs = 1);

} // namespace snc

#endif // SNC_SIMULATOR_HPP
