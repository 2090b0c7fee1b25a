// envelope_models.cpp - Effective bandwidth / effective capacity evaluation.

#include "snc/envelope_models.hpp"

#include <cmath>
#include <sstream>

#include "snc/errors.hpp"

namespace snc {

namespace {

void require_theta(double theta)
{
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        std::ostringstream msg;
        msg << "theta must be a positive finite number (got " << theta << ")";
        throw DomainError(msg.str());
    }
}

void require_interval(std::int64_t t)
{
    if (t < 1) {
        throw DomainError("interval length t must be at least one slot");
    }
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

MmooParams MmooParams::from_seconds(double peak_bps, double mean_on_s, double mean_off_s, double slot_length_s)
{
    if (!(slot_length_s > 0.0)) {
        throw DomainError("slot length must be positive");
    }
    if (!(mean_on_s > 0.0) || !(mean_off_s > 0.0)) {
        throw DomainError("mean on/off durations must be positive");
    }
    MmooParams p;
    p.peak_bits_per_slot = peak_bps * slot_length_s;
    p.rate_on_off = slot_length_s / mean_on_s;
    p.rate_off_on = slot_length_s / mean_off_s;
    p.validate();
    return p;
}

void MmooParams::validate() const
{
    if (!(peak_bits_per_slot > 0.0) || !std::isfinite(peak_bits_per_slot)) {
        throw DomainError("MMOO peak rate must be positive and finite");
    }
    if (!(rate_on_off >= 0.0) || !(rate_off_on >= 0.0) || !std::isfinite(rate_on_off) ||
        !std::isfinite(rate_off_on)) {
        throw DomainError("MMOO transition rates must be nonnegative and finite");
    }
    if (rate_on_off == 0.0 && rate_off_on == 0.0) {
        throw DomainError("MMOO with both transition rates zero has no stationary distribution; "
                          "use a constant-rate source instead");
    }
}

double mmoo_mean_rate(const MmooParams& params)
{
    const double total = params.rate_on_off + params.rate_off_on;
    if (!(total > 0.0)) {
        throw DomainError("MMOO mean rate undefined when both transition rates are zero");
    }
    return params.peak_bits_per_slot * params.rate_off_on / total;
}

double mmoo_effective_bandwidth(const MmooParams& params, double theta)
{
    require_theta(theta);
    const double p = params.peak_bits_per_slot;
    const double r10 = params.rate_on_off;
    const double r01 = params.rate_off_on;
    const double a = p * theta;
    const double root = std::sqrt((a - r10 + r01) * (a - r10 + r01) + 4.0 * r10 * r01);
    const double lead = r10 + r01 - a;
    if (lead > 0.0) {
        // root - lead == 4*r01*a / (root + lead); avoids cancellation for small theta.
        return 2.0 * r01 * p / (root + lead);
    }
    return (root - lead) / (2.0 * theta);
}

TrafficModel TrafficModel::mmoo(const MmooParams& params)
{
    params.validate();
    return TrafficModel(params);
}

TrafficModel TrafficModel::constant_rate(double bits_per_slot)
{
    if (!(bits_per_slot >= 0.0) || !std::isfinite(bits_per_slot)) {
        throw DomainError("constant rate must be nonnegative and finite");
    }
    return TrafficModel(ConstantRate{bits_per_slot});
}

TrafficModel TrafficModel::aggregate(std::uint64_t count, TrafficModel inner)
{
    if (count == 0) {
        throw DomainError("aggregate flow count must be positive");
    }
    return TrafficModel(Aggregate{count, std::make_shared<const TrafficModel>(std::move(inner))});
}

double TrafficModel::mean_rate() const
{
    return std::visit(overloaded{
                          [](const MmooParams& p) { return mmoo_mean_rate(p); },
                          [](const ConstantRate& c) { return c.bits_per_slot; },
                          [](const Aggregate& g) { return static_cast<double>(g.count) * g.inner->mean_rate(); },
                      },
                      _variant);
}

double TrafficModel::source_peak() const
{
    return std::visit(overloaded{
                          [](const MmooParams& p) { return p.peak_bits_per_slot; },
                          [](const ConstantRate& c) { return c.bits_per_slot; },
                          [](const Aggregate& g) { return g.inner->source_peak(); },
                      },
                      _variant);
}

double TrafficModel::typical_burst() const
{
    return std::visit(overloaded{
                          [](const MmooParams& p) {
                              return p.rate_on_off > 0.0 ? p.peak_bits_per_slot / p.rate_on_off
                                                         : p.peak_bits_per_slot;
                          },
                          [](const ConstantRate&) { return 1.0; },
                          [](const Aggregate& g) { return g.inner->typical_burst(); },
                      },
                      _variant);
}

bool operator==(const TrafficModel& a, const TrafficModel& b)
{
    if (a._variant.index() != b._variant.index()) {
        return false;
    }
    return std::visit(overloaded{
                          [&](const MmooParams& p) { return p == std::get<MmooParams>(b._variant); },
                          [&](const ConstantRate& c) { return c == std::get<ConstantRate>(b._variant); },
                          [&](const Aggregate& g) {
                              const auto& other = std::get<Aggregate>(b._variant);
                              return g.count == other.count && *g.inner == *other.inner;
                          },
                      },
                      a._variant);
}

double effective_bandwidth(const TrafficModel& model, double theta, std::int64_t t)
{
    require_theta(theta);
    require_interval(t);
    return std::visit(overloaded{
                          [&](const MmooParams& p) { return mmoo_effective_bandwidth(p, theta); },
                          [](const ConstantRate& c) { return c.bits_per_slot; },
                          [&](const Aggregate& g) {
                              return static_cast<double>(g.count) * effective_bandwidth(*g.inner, theta, t);
                          },
                      },
                      model.variant());
}

ServiceModel ServiceModel::constant_server(double capacity)
{
    if (!(capacity > 0.0) || !std::isfinite(capacity)) {
        throw DomainError("server capacity must be positive and finite");
    }
    return ServiceModel(ConstantServer{capacity});
}

ServiceModel ServiceModel::leftover(double capacity, std::uint64_t cross_count, TrafficModel cross)
{
    if (!(capacity > 0.0) || !std::isfinite(capacity)) {
        throw DomainError("server capacity must be positive and finite");
    }
    return ServiceModel(Leftover{capacity, cross_count, std::move(cross)});
}

double ServiceModel::capacity() const
{
    return std::visit([](const auto& s) { return s.capacity; }, _variant);
}

double effective_capacity(const ServiceModel& model, double theta, std::int64_t t)
{
    require_theta(theta);
    require_interval(t);
    return std::visit(overloaded{
                          [](const ConstantServer& s) { return s.capacity; },
                          [&](const Leftover& s) {
                              if (s.cross_count == 0) {
                                  return s.capacity;
                              }
                              return s.capacity -
                                     static_cast<double>(s.cross_count) * effective_bandwidth(s.cross, theta, t);
                          },
                      },
                      model.variant());
}

} // namespace snc
