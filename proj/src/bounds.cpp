// bounds.cpp - Log-domain evaluation, inversion and theta minimization of the tandem tail bounds.

#include "snc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "snc/errors.hpp"
#include "snc/log_sum_exp.hpp"

namespace snc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Delay search ceiling for infinite horizons (slots); doubles stay exact up to 2^53.
constexpr std::int64_t kMaxDelaySlots = std::int64_t{1} << 52;

void require_epsilon(double epsilon)
{
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        std::ostringstream msg;
        msg << "violation probability epsilon must lie in (0, 1] (got " << epsilon << ")";
        throw DomainError(msg.str());
    }
}

void require_theta(double theta)
{
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw DomainError("theta must be a positive finite number");
    }
}

// Sums log-terms term(u) for u = first, first+1, ... until the truncation rule fires.
template <class TermFn>
SeriesValue truncated_series(TermFn term, std::int64_t first, const SeriesOptions& options)
{
    const double log_tol = std::log(options.truncation_relative_tolerance);
    LogSumExp acc;
    int small_run = 0;
    double prev = -kInf;
    double last = -kInf;
    std::int64_t n = 0;
    for (std::int64_t u = first; n < options.truncation_cap; ++u, ++n) {
        prev = last;
        last = term(u);
        const double before = acc.value();
        acc.add(last);
        // A term's contribution includes the geometric tail its decay ratio implies, so slowly
        // decaying series are not cut while the remainder is still significant.
        const double log_ratio = last - prev;
        const double contribution = log_ratio < 0.0 ? last - std::log(-std::expm1(log_ratio)) : kInf;
        if (!acc.empty() && contribution < before + log_tol) {
            if (++small_run >= options.truncation_consecutive_terms) {
                return {acc.value(), false, n + 1};
            }
        } else {
            small_run = 0;
        }
    }
    if (last >= prev) {
        return {kInf, true, n};
    }
    // Still decaying at the cap: close with the geometric tail implied by the last ratio.
    const double log_ratio = last - prev;
    LogSumExp closed;
    closed.add(acc.value());
    closed.add(last + log_ratio - std::log(-std::expm1(log_ratio)));
    return {closed.value(), false, n};
}

// Groups structurally identical hops so the product of H-th roots of identical sums collapses
// to a single factor.
struct HopGroup {
    std::size_t representative;
    int count;
};

std::vector<HopGroup> group_hops(const std::vector<ServiceModel>& hops, std::size_t end)
{
    std::vector<HopGroup> groups;
    for (std::size_t i = 0; i < end; ++i) {
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const HopGroup& g) { return hops[g.representative] == hops[i]; });
        if (it == groups.end()) {
            groups.push_back({i, 1});
        } else {
            ++it->count;
        }
    }
    return groups;
}

// sum over hops [0, end) of log S_i, weighted by 1/H; divergent if any series diverges.
struct WeightedLogSum {
    double value = 0.0;
    bool divergent = false;
    std::int64_t terms_used = 0;
};

WeightedLogSum weighted_hop_series(const NetworkPath& path, std::size_t end, Horizon horizon, double theta,
                                   const SeriesOptions& options, double weight_per_hop)
{
    WeightedLogSum out;
    for (const HopGroup& g : group_hops(path.hops(), end)) {
        const SeriesValue s = log_hop_series(path.through(), path.hops()[g.representative], horizon, theta, options);
        out.terms_used = std::max(out.terms_used, s.terms_used);
        if (s.divergent) {
            out.divergent = true;
            return out;
        }
        out.value += (g.count * weight_per_hop) * s.log_sum;
    }
    return out;
}

std::vector<double> hop_margins(const NetworkPath& path, double theta)
{
    std::vector<double> margins;
    const double alpha = effective_bandwidth(path.through(), theta, 1);
    for (const ServiceModel& hop : path.hops()) {
        margins.push_back(effective_capacity(hop, theta, 1) - alpha);
    }
    return margins;
}

// epsilon = 1 admits the trivial threshold 0: P{X > 0} <= 1 always holds.
void apply_trivial_epsilon(BoundResult& r, double epsilon)
{
    if (epsilon >= 1.0) {
        r.value = 0.0;
        r.clamped_to_zero = true;
        r.violation_probability = 1.0;
    }
}

void fill_diagnostics(BoundResult& r, const NetworkPath& path, Horizon horizon)
{
    r.hop_margins = hop_margins(path, r.theta_star);
    r.stable_at_theta_star =
        std::all_of(r.hop_margins.begin(), r.hop_margins.end(), [](double m) { return m > 0.0; });
    if (!horizon.is_infinite()) {
        r.truncation_horizon_used = horizon.slots();
    }
}

struct DelaySearch {
    double delay = kInf;
    bool divergent = false;
    bool horizon_limited = false;
    std::int64_t terms_used = 0;
};

DelaySearch search_delay(const NetworkPath& path, double epsilon, Horizon horizon, double theta,
                         const SeriesOptions& options)
{
    DelaySearch out;
    const int h = path.hop_count();
    const double weight = 1.0 / h;
    const WeightedLogSum head = weighted_hop_series(path, path.hops().size() - 1, horizon, theta, options, weight);
    if (head.divergent) {
        out.divergent = true;
        return out;
    }
    const double log_eps = std::log(epsilon);
    const ServiceModel& last = path.hops().back();
    bool divergent = false;
    auto satisfied = [&](std::int64_t d) {
        const SeriesValue s = log_last_hop_delay_series(path.through(), last, d, horizon, theta, options);
        out.terms_used = std::max(out.terms_used, s.terms_used);
        if (s.divergent) {
            divergent = true;
            return false;
        }
        return head.value + weight * s.log_sum <= log_eps;
    };

    const std::int64_t limit = horizon.is_infinite() ? kMaxDelaySlots : horizon.slots();
    if (satisfied(0)) {
        out.delay = 0.0;
        return out;
    }
    if (divergent) {
        out.divergent = true;
        return out;
    }
    // Exponential search for an upper bracket, then bisection; the bound is nonincreasing in d.
    std::int64_t lo = 0;
    std::int64_t hi = 1;
    while (true) {
        hi = std::min(hi, limit);
        if (satisfied(hi)) {
            break;
        }
        if (divergent) {
            out.divergent = true;
            return out;
        }
        if (hi == limit) {
            out.horizon_limited = true;
            return out;
        }
        lo = hi;
        hi = hi > limit / 2 ? limit : hi * 2;
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (satisfied(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    out.delay = static_cast<double>(hi);
    return out;
}

} // namespace

Horizon Horizon::finite(std::int64_t slots)
{
    if (slots < 0) {
        throw DomainError("horizon must be nonnegative");
    }
    Horizon h;
    h._slots = slots;
    return h;
}

NetworkPath::NetworkPath(TrafficModel through, std::vector<ServiceModel> hops)
    : _through(std::move(through)), _hops(std::move(hops)), _homogeneous(true)
{
    if (_hops.empty()) {
        throw DomainError("a network path needs at least one hop");
    }
    _homogeneous = std::all_of(_hops.begin(), _hops.end(), [&](const ServiceModel& s) { return s == _hops.front(); });
}

SeriesValue log_hop_series(const TrafficModel& through, const ServiceModel& hop, Horizon horizon, double theta,
                           const SeriesOptions& options)
{
    require_theta(theta);
    auto term = [&](std::int64_t u) {
        if (u == 0) {
            return 0.0;
        }
        const double ud = static_cast<double>(u);
        return 0.5 * theta * ud * (effective_bandwidth(through, theta, u) - effective_capacity(hop, theta, u));
    };
    if (!horizon.is_infinite()) {
        LogSumExp acc;
        for (std::int64_t u = 0; u <= horizon.slots(); ++u) {
            acc.add(term(u));
        }
        return {acc.value(), false, horizon.slots() + 1};
    }
    if (options.use_closed_form) {
        const double g = 0.5 * theta * (effective_bandwidth(through, theta, 1) - effective_capacity(hop, theta, 1));
        if (!(g < 0.0)) {
            return {kInf, true, 0};
        }
        return {log_geometric_series(g), false, 0};
    }
    return truncated_series(term, 0, options);
}

SeriesValue log_last_hop_delay_series(const TrafficModel& through, const ServiceModel& hop, std::int64_t delay,
                                      Horizon horizon, double theta, const SeriesOptions& options)
{
    require_theta(theta);
    if (delay < 0) {
        throw DomainError("delay threshold must be nonnegative");
    }
    auto term = [&](std::int64_t u) {
        const std::int64_t lag = u - delay;
        const double arrivals = lag == 0 ? 0.0 : static_cast<double>(lag) * effective_bandwidth(through, theta, lag);
        const double service = u == 0 ? 0.0 : static_cast<double>(u) * effective_capacity(hop, theta, u);
        return 0.5 * theta * (arrivals - service);
    };
    if (!horizon.is_infinite()) {
        if (horizon.slots() < delay) {
            throw DomainError("finite horizon must be at least the delay threshold");
        }
        LogSumExp acc;
        for (std::int64_t u = delay; u <= horizon.slots(); ++u) {
            acc.add(term(u));
        }
        return {acc.value(), false, horizon.slots() - delay + 1};
    }
    if (options.use_closed_form) {
        const double alpha = effective_bandwidth(through, theta, 1);
        const double beta = effective_capacity(hop, theta, 1);
        const double g = 0.5 * theta * (alpha - beta);
        if (!(g < 0.0)) {
            return {kInf, true, 0};
        }
        return {-0.5 * theta * static_cast<double>(delay) * beta + log_geometric_series(g), false, 0};
    }
    return truncated_series(term, delay, options);
}

TailEvaluation backlog_violation_at_theta(const NetworkPath& path, double backlog_bits, Horizon horizon, double theta,
                                          const SeriesOptions& options)
{
    require_theta(theta);
    if (!(backlog_bits >= 0.0)) {
        throw DomainError("backlog threshold must be nonnegative");
    }
    const int h = path.hop_count();
    const WeightedLogSum sum = weighted_hop_series(path, path.hops().size(), horizon, theta, options, 1.0 / h);
    TailEvaluation out;
    out.terms_used = sum.terms_used;
    if (sum.divergent) {
        out.divergent = true;
        return out;
    }
    out.log_value = sum.value - theta * backlog_bits / (2.0 * h);
    out.value = std::exp(out.log_value);
    return out;
}

TailEvaluation delay_violation_at_theta(const NetworkPath& path, std::int64_t delay_slots, Horizon horizon,
                                        double theta, const SeriesOptions& options)
{
    require_theta(theta);
    const int h = path.hop_count();
    const double weight = 1.0 / h;
    const WeightedLogSum head = weighted_hop_series(path, path.hops().size() - 1, horizon, theta, options, weight);
    TailEvaluation out;
    out.terms_used = head.terms_used;
    if (head.divergent) {
        out.divergent = true;
        return out;
    }
    const SeriesValue last =
        log_last_hop_delay_series(path.through(), path.hops().back(), delay_slots, horizon, theta, options);
    out.terms_used = std::max(out.terms_used, last.terms_used);
    if (last.divergent) {
        out.divergent = true;
        return out;
    }
    out.log_value = head.value + weight * last.log_sum;
    out.value = std::exp(out.log_value);
    return out;
}

const char* to_string(BoundKind kind)
{
    return kind == BoundKind::backlog ? "backlog" : "delay";
}

double backlog_bound_at_theta(const NetworkPath& path, double epsilon, Horizon horizon, double theta,
                              const SeriesOptions& options)
{
    require_epsilon(epsilon);
    require_theta(theta);
    const int h = path.hop_count();
    const WeightedLogSum sum = weighted_hop_series(path, path.hops().size(), horizon, theta, options, 1.0);
    if (sum.divergent) {
        return kInf;
    }
    const double x = (2.0 / theta) * (sum.value - h * std::log(epsilon));
    return std::max(x, 0.0);
}

double delay_bound_at_theta(const NetworkPath& path, double epsilon, Horizon horizon, double theta,
                            const SeriesOptions& options)
{
    require_epsilon(epsilon);
    return search_delay(path, epsilon, horizon, theta, options).delay;
}

BoundResult backlog_bound(const NetworkPath& path, double epsilon, Horizon horizon, const ThetaSearchConfig& search,
                          const SeriesOptions& options)
{
    require_epsilon(epsilon);
    const ThetaOptimum opt = minimize_over_theta(
        [&](double theta) { return backlog_bound_at_theta(path, epsilon, horizon, theta, options); }, search);

    BoundResult r;
    r.kind = BoundKind::backlog;
    r.theta_star = opt.theta;
    r.value = opt.value;
    r.theta_at_boundary = opt.at_upper_boundary || opt.at_lower_boundary;
    const TailEvaluation check = backlog_violation_at_theta(path, r.value, horizon, r.theta_star, options);
    r.clamped_to_zero = r.value == 0.0 && check.value > epsilon;
    r.violation_probability = std::clamp(check.value, 0.0, 1.0);
    r.truncation_horizon_used = check.terms_used;
    fill_diagnostics(r, path, horizon);
    apply_trivial_epsilon(r, epsilon);
    return r;
}

BoundResult delay_bound(const NetworkPath& path, double epsilon, Horizon horizon, const ThetaSearchConfig& search,
                        const SeriesOptions& options)
{
    require_epsilon(epsilon);
    bool any_convergent = false;
    auto objective = [&](double theta) {
        const DelaySearch s = search_delay(path, epsilon, horizon, theta, options);
        any_convergent = any_convergent || !s.divergent;
        return s.delay;
    };
    ThetaOptimum opt;
    try {
        opt = minimize_over_theta(objective, search);
    } catch (const InstabilityError&) {
        if (any_convergent && !horizon.is_infinite()) {
            throw HorizonTooSmallError("no delay within the horizon of " + std::to_string(horizon.slots()) +
                                       " slots meets the requested violation probability");
        }
        throw;
    }

    BoundResult r;
    r.kind = BoundKind::delay;
    r.theta_star = opt.theta;
    r.value = opt.value;
    r.theta_at_boundary = opt.at_upper_boundary || opt.at_lower_boundary;
    const TailEvaluation check =
        delay_violation_at_theta(path, static_cast<std::int64_t>(r.value), horizon, r.theta_star, options);
    r.clamped_to_zero = r.value == 0.0 && check.value > epsilon;
    r.violation_probability = std::clamp(check.value, 0.0, 1.0);
    r.truncation_horizon_used = check.terms_used;
    fill_diagnostics(r, path, horizon);
    apply_trivial_epsilon(r, epsilon);
    return r;
}

BoundResult backlog_tail_bound(const NetworkPath& path, double backlog_bits, Horizon horizon,
                               const ThetaSearchConfig& search, const SeriesOptions& options)
{
    auto objective = [&](double theta) {
        const TailEvaluation e = backlog_violation_at_theta(path, backlog_bits, horizon, theta, options);
        return e.divergent ? kInf : e.log_value;
    };
    const ThetaOptimum opt = minimize_over_theta(objective, search);
    BoundResult r;
    r.kind = BoundKind::backlog;
    r.value = backlog_bits;
    r.theta_star = opt.theta;
    r.theta_at_boundary = opt.at_upper_boundary || opt.at_lower_boundary;
    r.violation_probability = std::clamp(std::exp(opt.value), 0.0, 1.0);
    fill_diagnostics(r, path, horizon);
    return r;
}

BoundResult delay_tail_bound(const NetworkPath& path, std::int64_t delay_slots, Horizon horizon,
                             const ThetaSearchConfig& search, const SeriesOptions& options)
{
    auto objective = [&](double theta) {
        const TailEvaluation e = delay_violation_at_theta(path, delay_slots, horizon, theta, options);
        return e.divergent ? kInf : e.log_value;
    };
    const ThetaOptimum opt = minimize_over_theta(objective, search);
    BoundResult r;
    r.kind = BoundKind::delay;
    r.value = static_cast<double>(delay_slots);
    r.theta_star = opt.theta;
    r.theta_at_boundary = opt.at_upper_boundary || opt.at_lower_boundary;
    r.violation_probability = std::clamp(std::exp(opt.value), 0.0, 1.0);
    fill_diagnostics(r, path, horizon);
    return r;
}

NetworkPath HomogeneousNetwork::path() const
{
    if (hops < 1) {
        throw DomainError("hop count must be at least 1");
    }
    if (through_count == 0) {
        throw DomainError("at least one through flow is required for a path");
    }
    return NetworkPath(TrafficModel::aggregate(through_count, through),
                       std::vector<ServiceModel>(static_cast<std::size_t>(hops),
                                                 ServiceModel::leftover(capacity, cross_count, cross)));
}

double stability_margin(std::uint64_t through_count, const TrafficModel& through, std::uint64_t cross_count,
                        const TrafficModel& cross, double capacity, double theta)
{
    require_theta(theta);
    double margin = capacity;
    if (through_count > 0) {
        margin -= static_cast<double>(through_count) * effective_bandwidth(through, theta, 1);
    }
    if (cross_count > 0) {
        margin -= static_cast<double>(cross_count) * effective_bandwidth(cross, theta, 1);
    }
    return margin;
}

namespace {

void require_network(const HomogeneousNetwork& net)
{
    if (!(net.capacity > 0.0)) {
        throw DomainError("capacity must be positive");
    }
    if (net.hops < 1) {
        throw DomainError("hop count must be at least 1");
    }
}

// log(1 / (eps (1 - e^{-(theta/2) margin}))), or +inf when margin <= 0.
double closed_form_log_term(const HomogeneousNetwork& net, double epsilon, double theta)
{
    const double margin =
        stability_margin(net.through_count, net.through, net.cross_count, net.cross, net.capacity, theta);
    if (!(margin > 0.0)) {
        return kInf;
    }
    return log_geometric_series(-0.5 * theta * margin) - std::log(epsilon);
}

double leftover_rate(const HomogeneousNetwork& net, double theta)
{
    return stability_margin(0, net.through, net.cross_count, net.cross, net.capacity, theta);
}

} // namespace

double closed_form_backlog_at_theta(const HomogeneousNetwork& net, double epsilon, double theta)
{
    require_epsilon(epsilon);
    require_theta(theta);
    require_network(net);
    const double log_term = closed_form_log_term(net, epsilon, theta);
    if (!std::isfinite(log_term)) {
        return kInf;
    }
    return std::max(0.0, 2.0 * net.hops / theta * log_term);
}

double closed_form_delay_at_theta(const HomogeneousNetwork& net, double epsilon, double theta)
{
    require_epsilon(epsilon);
    require_theta(theta);
    require_network(net);
    const double log_term = closed_form_log_term(net, epsilon, theta);
    if (!std::isfinite(log_term)) {
        return kInf;
    }
    return std::max(0.0, 2.0 * net.hops / (theta * leftover_rate(net, theta)) * log_term);
}

namespace {

BoundResult closed_form_result(const HomogeneousNetwork& net, double epsilon, const ThetaSearchConfig& search,
                               BoundKind kind)
{
    require_epsilon(epsilon);
    require_network(net);
    auto objective = [&](double theta) {
        return kind == BoundKind::backlog ? closed_form_backlog_at_theta(net, epsilon, theta)
                                          : closed_form_delay_at_theta(net, epsilon, theta);
    };
    const ThetaOptimum opt = minimize_over_theta(objective, search);
    BoundResult r;
    r.kind = kind;
    r.value = opt.value;
    r.theta_star = opt.theta;
    r.theta_at_boundary = opt.at_upper_boundary || opt.at_lower_boundary;

    const double theta = opt.theta;
    const double margin =
        stability_margin(net.through_count, net.through, net.cross_count, net.cross, net.capacity, theta);
    const double log_series = log_geometric_series(-0.5 * theta * margin);
    const double decay = kind == BoundKind::backlog ? r.value : r.value * leftover_rate(net, theta);
    const double log_violation = log_series - theta * decay / (2.0 * net.hops);
    r.clamped_to_zero = r.value == 0.0 && log_violation > std::log(epsilon);
    r.violation_probability = std::clamp(std::exp(log_violation), 0.0, 1.0);
    r.hop_margins.assign(static_cast<std::size_t>(net.hops), margin);
    r.stable_at_theta_star = margin > 0.0;
    apply_trivial_epsilon(r, epsilon);
    return r;
}

} // namespace

BoundResult closed_form_backlog(const HomogeneousNetwork& net, double epsilon, const ThetaSearchConfig& search)
{
    return closed_form_result(net, epsilon, search, BoundKind::backlog);
}

BoundResult closed_form_delay(const HomogeneousNetwork& net, double epsilon, const ThetaSearchConfig& search)
{
    return closed_form_result(net, epsilon, search, BoundKind::delay);
}

ThetaSearchConfig default_theta_search(const NetworkPath& path)
{
    double peak = path.through().source_peak();
    double burst = path.through().typical_burst();
    for (const ServiceModel& hop : path.hops()) {
        if (const auto* left = std::get_if<Leftover>(&hop.variant()); left && left->cross_count > 0) {
            peak = std::max(peak, left->cross.source_peak());
            burst = std::max(burst, left->cross.typical_burst());
        }
    }
    ThetaSearchConfig config;
    config.theta_max = 700.0 / std::max(peak, 1e-300);
    config.theta_min = 1e-9 / std::max(burst, 1.0);
    if (!(config.theta_min < config.theta_max)) {
        config.theta_min = config.theta_max * 1e-12;
    }
    return config;
}

} // namespace snc
