// simulator.cpp - Slot-by-slot tandem simulation with exact through/cross accounting.

#include "snc/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "snc/errors.hpp"

namespace snc {

namespace {

std::uint64_t probability_threshold(double p)
{
    // rng() < threshold happens with probability p (to 2^-64)
    return static_cast<std::uint64_t>(std::ldexp(p, 64));
}

constexpr double kAlwaysProbability = 1.0 - 0x1.0p-53;

} // namespace

MmooChain::MmooChain(const MmooParams& params)
    : _params(params),
      _leave_on(-std::expm1(-params.rate_on_off)),
      _leave_off(-std::expm1(-params.rate_off_on)),
      _leave_on_threshold(0),
      _leave_off_threshold(0),
      _leave_on_always(false),
      _leave_off_always(false)
{
    params.validate();
    _leave_on_always = _leave_on >= kAlwaysProbability;
    _leave_off_always = _leave_off >= kAlwaysProbability;
    if (!_leave_on_always) {
        _leave_on_threshold = probability_threshold(_leave_on);
    }
    if (!_leave_off_always) {
        _leave_off_threshold = probability_threshold(_leave_off);
    }
}

SourceState MmooChain::stationary_state(CounterRng& rng) const
{
    const double p_on = _params.rate_off_on / (_params.rate_on_off + _params.rate_off_on);
    if (p_on >= kAlwaysProbability) {
        rng();
        return SourceState::on;
    }
    return rng() < probability_threshold(p_on) ? SourceState::on : SourceState::off;
}

bool MmooChain::leaves(SourceState state, CounterRng& rng) const
{
    const std::uint64_t draw = rng();
    if (state == SourceState::on) {
        return _leave_on_always || draw < _leave_on_threshold;
    }
    return _leave_off_always || draw < _leave_off_threshold;
}

SourceStep mmoo_source_step(SourceState state, CounterRng& rng, const MmooChain& chain)
{
    SourceStep step;
    step.emitted_bits = state == SourceState::on ? chain.params().peak_bits_per_slot : 0.0;
    const bool flip = chain.leaves(state, rng);
    step.next = flip ? (state == SourceState::on ? SourceState::off : SourceState::on) : state;
    return step;
}

double SimScenario::utilization() const
{
    const double mean = mmoo_mean_rate(source);
    return (static_cast<double>(through_count) + static_cast<double>(cross_count)) * mean /
           static_cast<double>(capacity_bits_per_slot);
}

std::int64_t SimScenario::peak_bits() const
{
    return static_cast<std::int64_t>(std::llround(source.peak_bits_per_slot));
}

void SimScenario::validate() const
{
    std::ostringstream problems;
    if (hops < 1) {
        problems << "hops must be >= 1; ";
    }
    if (capacity_bits_per_slot <= 0) {
        problems << "capacity must be positive; ";
    }
    if (through_count < 1) {
        problems << "at least one through flow is required; ";
    }
    if (measure_slots < 1) {
        problems << "measure_slots must be >= 1; ";
    }
    if (warmup_slots < 0) {
        problems << "warmup_slots must be >= 0; ";
    }
    if (replications < 1) {
        problems << "replications must be >= 1; ";
    }
    if (!(max_backlog_slots > 0.0)) {
        problems << "max_backlog_slots must be positive; ";
    }
    try {
        source.validate();
        const double peak = source.peak_bits_per_slot;
        if (std::abs(peak - std::round(peak)) > 1e-9 * std::max(1.0, peak)) {
            problems << "source peak of " << peak
                     << " bits/slot is not a whole number of bits; choose a slot length that makes it integral; ";
        }
    } catch (const DomainError& e) {
        problems << e.what() << "; ";
    }
    const std::string text = problems.str();
    if (!text.empty()) {
        throw DomainError("invalid simulation scenario: " + text.substr(0, text.size() - 2));
    }
    const double rho = utilization();
    if (rho > 1.0) {
        std::ostringstream msg;
        msg << "unstable tandem: mean utilization per hop (N+M)*m/C = " << rho
            << " exceeds 1; queues grow without bound";
        throw InstabilityError(msg.str());
    }
}

NetworkPath SimScenario::path() const
{
    HomogeneousNetwork net;
    net.through_count = through_count;
    net.through = TrafficModel::mmoo(source);
    net.cross_count = cross_count;
    net.cross = TrafficModel::mmoo(source);
    net.capacity = static_cast<double>(capacity_bits_per_slot);
    net.hops = hops;
    return net.path();
}

void SimResult::merge(const SimResult& other)
{
    delay_samples.merge(other.delay_samples);
    backlog_samples.merge(other.backlog_samples);
    replication_seeds.insert(replication_seeds.end(), other.replication_seeds.begin(), other.replication_seeds.end());
    slots_per_replication = std::max(slots_per_replication, other.slots_per_replication);
}

namespace {

struct Source {
    SourceState state;
    CounterRng rng;
};

struct Chunk {
    std::int64_t bits;
    bool through;
};

// FIFO of class-tagged chunks; adjacent chunks of one class are coalesced.
class HopQueue {
public:
    void enqueue(std::int64_t bits, bool through)
    {
        if (bits <= 0) {
            return;
        }
        if (!_chunks.empty() && _chunks.back().through == through) {
            _chunks.back().bits += bits;
        } else {
            _chunks.push_back({bits, through});
        }
        _queued += bits;
        if (through) {
            _queued_through += bits;
            _through_in += bits;
        }
    }

    // Serves up to capacity bits in FIFO order; returns through bits departed.
    std::int64_t serve(std::int64_t capacity)
    {
        std::int64_t budget = capacity;
        std::int64_t through_out = 0;
        while (budget > 0 && !_chunks.empty()) {
            Chunk& head = _chunks.front();
            const std::int64_t take = std::min(head.bits, budget);
            head.bits -= take;
            budget -= take;
            if (head.through) {
                through_out += take;
            }
            if (head.bits == 0) {
                _chunks.pop_front();
            }
        }
        const std::int64_t served = capacity - budget;
        _queued -= served;
        _queued_through -= through_out;
        _through_out += through_out;
        _last_served = served;
        return through_out;
    }

    std::int64_t queued() const { return _queued; }
    std::int64_t queued_through() const { return _queued_through; }
    std::int64_t through_in() const { return _through_in; }
    std::int64_t through_out() const { return _through_out; }
    std::int64_t last_served() const { return _last_served; }

private:
    std::deque<Chunk> _chunks;
    std::int64_t _queued = 0;
    std::int64_t _queued_through = 0;
    std::int64_t _through_in = 0;
    std::int64_t _through_out = 0;
    std::int64_t _last_served = 0;
};

std::int64_t emit_all(std::vector<Source>& sources, const MmooChain& chain, std::int64_t peak)
{
    std::int64_t bits = 0;
    for (Source& s : sources) {
        if (s.state == SourceState::on) {
            bits += peak;
        }
        if (chain.leaves(s.state, s.rng)) {
            s.state = s.state == SourceState::on ? SourceState::off : SourceState::on;
        }
    }
    return bits;
}

void audit_fail(const char* what, int hop, std::int64_t slot)
{
    std::ostringstream msg;
    msg << what << " violated at hop " << hop << ", slot " << slot;
    throw std::logic_error(msg.str());
}

} // namespace

SimResult simulate_replication(const SimScenario& scenario, int replication)
{
    scenario.validate();
    if (replication < 0 || replication >= scenario.replications) {
        throw DomainError("replication index out of range");
    }
    const MmooChain chain(scenario.source);
    const std::int64_t peak = scenario.peak_bits();
    const std::int64_t capacity = scenario.capacity_bits_per_slot;
    const auto rep = static_cast<std::uint64_t>(replication);

    auto make_sources = [&](std::uint64_t hop, std::uint64_t count) {
        std::vector<Source> sources;
        sources.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            CounterRng rng(CounterRng::derive(scenario.base_seed, {rep, hop, i}));
            const SourceState initial = chain.stationary_state(rng);
            sources.push_back({initial, rng});
        }
        return sources;
    };

    // Hop 0 holds the through sources; hop h >= 1 the cross sources entering at hop h.
    std::vector<Source> through = make_sources(0, scenario.through_count);
    std::vector<std::vector<Source>> cross;
    for (int h = 1; h <= scenario.hops; ++h) {
        cross.push_back(make_sources(static_cast<std::uint64_t>(h), scenario.cross_count));
    }
    std::vector<HopQueue> queues(static_cast<std::size_t>(scenario.hops));

    SimResult result;
    result.replication_seeds.push_back(CounterRng::derive(scenario.base_seed, {rep}));
    result.slots_per_replication = scenario.measure_slots;

    const double queue_cap = static_cast<double>(capacity) * scenario.max_backlog_slots;
    std::int64_t arrivals = 0;   // A(t), cumulative through bits at ingress
    std::int64_t departures = 0; // D(t), cumulative through bits at egress
    // A(s) for s = oldest .. t, where A(oldest) <= D(t); starts with A(-1) = 0.
    std::deque<std::int64_t> history{0};
    std::int64_t oldest = -1;

    const std::int64_t total = scenario.warmup_slots + scenario.measure_slots;
    for (std::int64_t t = 0; t < total; ++t) {
        std::int64_t flow = emit_all(through, chain, peak);
        arrivals += flow;
        for (int h = 0; h < scenario.hops; ++h) {
            HopQueue& q = queues[static_cast<std::size_t>(h)];
            // cross traffic enqueues ahead of through traffic arriving in the same slot
            q.enqueue(emit_all(cross[static_cast<std::size_t>(h)], chain, peak), false);
            q.enqueue(flow, true);
            const std::int64_t offered = q.queued();
            flow = q.serve(capacity);
            if (scenario.audit) {
                if (q.last_served() != std::min(offered, capacity)) {
                    audit_fail("work conservation", h + 1, t);
                }
                if (q.through_out() > q.through_in()) {
                    audit_fail("causality", h + 1, t);
                }
                if (q.through_in() != q.queued_through() + q.through_out()) {
                    audit_fail("flow conservation", h + 1, t);
                }
            }
            if (static_cast<double>(q.queued()) > queue_cap) {
                std::ostringstream msg;
                msg << "queue at hop " << h + 1 << " exceeded " << scenario.max_backlog_slots
                    << " slots of service at slot " << t << "; the tandem appears unstable";
                throw InstabilityError(msg.str());
            }
        }
        departures += flow;
        if (scenario.audit && departures > arrivals) {
            audit_fail("end-to-end causality", scenario.hops, t);
        }

        history.push_back(arrivals);
        while (history.size() >= 2 && history[1] <= departures) {
            history.pop_front();
            ++oldest;
        }
        if (t >= scenario.warmup_slots) {
            result.delay_samples.add(t - oldest);
            result.backlog_samples.add(arrivals - departures);
        }
    }
    return result;
}

SimResult simulate_tandem(const SimScenario& scenario, int jobs)
{
    scenario.validate();
    const int reps = scenario.replications;
    std::vector<SimResult> parts(static_cast<std::size_t>(reps));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(reps));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int r = next++; r < reps; r = next++) {
            try {
                parts[static_cast<std::size_t>(r)] = simulate_replication(scenario, r);
            } catch (...) {
                errors[static_cast<std::size_t>(r)] = std::current_exception();
            }
        }
    };
    const int threads = std::clamp(jobs, 1, reps);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    SimResult merged;
    for (const SimResult& part : parts) {
        merged.merge(part);
    }
    return merged;
}

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::pass:
        return "pass";
    case Verdict::fail:
        return "fail";
    case Verdict::inconclusive:
        return "inconclusive";
    }
    return "unknown";
}

ValidationReport validate_bound(const SimResult& sim, const BoundResult& bound, double epsilon, double slack)
{
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw DomainError("epsilon must lie in (0, 1]");
    }
    ValidationReport report;
    report.kind = bound.kind;
    report.threshold = bound.value;
    report.epsilon = epsilon;
    const Histogram& samples = bound.kind == BoundKind::delay ? sim.delay_samples : sim.backlog_samples;
    report.tail = empirical_tail(samples, bound.value);
    if (epsilon * static_cast<double>(samples.total()) < 100.0) {
        std::ostringstream msg;
        msg << "only " << samples.total() << " samples for epsilon = " << epsilon
            << "; need epsilon * samples >= 100 for a verdict";
        report.warning = msg.str();
        report.verdict = Verdict::inconclusive;
        return report;
    }
    report.verdict = report.tail.upper_limit <= epsilon * (1.0 + slack) ? Verdict::pass : Verdict::fail;
    return report;
}

ValidationReport validate_bound(const SimScenario& scenario, const BoundResult& bound, double epsilon, double slack,
                                int jobs)
{
    return validate_bound(simulate_tandem(scenario, jobs), bound, epsilon, slack);
}

} // namespace snc
