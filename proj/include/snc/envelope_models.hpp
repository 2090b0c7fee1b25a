// envelope_models.hpp - Effective bandwidth of arrival processes and effective capacity of service processes.
//
// Units: data in bits, time in slots, theta in 1/bit. Every model here is stationary and its
// effective bandwidth/capacity does not depend on the interval length t (the MMOO form is the
// t-independent upper envelope alpha(theta) >= alpha(theta, t)).

#ifndef SNC_ENVELOPE_MODELS_HPP
#define SNC_ENVELOPE_MODELS_HPP

#include <cstdint>
#include <memory>
#include <variant>

namespace snc {

// Two-state Markov-modulated on-off source in per-slot units.
struct MmooParams {
    double peak_bits_per_slot = 0.0; // P
    double rate_on_off = 0.0;        // r10 = 1/E[T_on], in 1/slot
    double rate_off_on = 0.0;        // r01 = 1/E[T_off], in 1/slot

    // Converts continuous-time parameters (bit/s, seconds) with the given slot length.
    static MmooParams from_seconds(double peak_bps, double mean_on_s, double mean_off_s, double slot_length_s);

    // Throws DomainError if P <= 0, a rate is negative or non-finite, or both rates are zero.
    void validate() const;

    bool operator==(const MmooParams&) const = default;
};

// Mean rate P*r01/(r10+r01) in bits/slot.
double mmoo_mean_rate(const MmooParams& params);

// Closed-form MMOO effective bandwidth
//   alpha(theta) = (P*theta - r10 - r01 + sqrt((P*theta - r10 + r01)^2 + 4*r10*r01)) / (2*theta).
// Evaluated in a cancellation-free rearrangement so that theta -> 0 recovers the mean rate.
double mmoo_effective_bandwidth(const MmooParams& params, double theta);

struct ConstantRate {
    double bits_per_slot = 0.0;
    bool operator==(const ConstantRate&) const = default;
};

class TrafficModel;

// n independent copies of the same source.
struct Aggregate {
    std::uint64_t count = 1;
    std::shared_ptr<const TrafficModel> inner;
};

class TrafficModel {
public:
    using Variant = std::variant<MmooParams, ConstantRate, Aggregate>;

    static TrafficModel mmoo(const MmooParams& params);
    static TrafficModel constant_rate(double bits_per_slot);
    static TrafficModel aggregate(std::uint64_t count, TrafficModel inner);

    const Variant& variant() const { return _variant; }

    // Long-run mean rate in bits/slot.
    double mean_rate() const;
    // Largest per-source emission in one slot; aggregates report their inner source.
    double source_peak() const;
    // Mean burst of a single source in bits (P times the mean on-period), 1 for constant sources.
    double typical_burst() const;

    friend bool operator==(const TrafficModel& a, const TrafficModel& b);

private:
    explicit TrafficModel(Variant v) : _variant(std::move(v)) {}
    Variant _variant;
};

// alpha(theta, t) in bits/slot. Requires theta > 0 and t >= 1.
double effective_bandwidth(const TrafficModel& model, double theta, std::int64_t t);

struct ConstantServer {
    double capacity = 0.0; // bits/slot
    bool operator==(const ConstantServer&) const = default;
};

// Service left to the through traffic at a work-conserving server of rate C shared with
// cross_count independent cross flows (blind multiplexing): S(t) = C*t - M*A_c(t).
struct Leftover {
    double capacity = 0.0;
    std::uint64_t cross_count = 0;
    TrafficModel cross;

    friend bool operator==(const Leftover&, const Leftover&) = default;
};

class ServiceModel {
public:
    using Variant = std::variant<ConstantServer, Leftover>;

    static ServiceModel constant_server(double capacity);
    static ServiceModel leftover(double capacity, std::uint64_t cross_count, TrafficModel cross);

    const Variant& variant() const { return _variant; }
    double capacity() const;

    friend bool operator==(const ServiceModel&, const ServiceModel&) = default;

private:
    explicit ServiceModel(Variant v) : _variant(std::move(v)) {}
    Variant _variant;
};

// beta(theta, t) in bits/slot. Leftover capacity can be negative; that is reported, not rejected.
double effective_capacity(const ServiceModel& model, double theta, std::int64_t t);

} // namespace snc

#endif // SNC_ENVELOPE_MODELS_HPP
