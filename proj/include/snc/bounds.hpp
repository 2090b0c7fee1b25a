// bounds.hpp - End-to-end backlog and delay tail bounds for a tandem of H hops.
//
// For a through flow with effective bandwidth alpha and hops with effective capacities beta_i,
//
//   P{B > x} <= prod_{i=1..H} ( sum_{u=0..t} e^{(theta u / 2)(alpha - beta_i)} )^{1/H} * e^{-theta x / (2H)}
//
//   P{W > d} <= prod_{i=1..H-1} ( same per-hop sum )^{1/H}
//               * ( sum_{u=d..t} e^{(theta/2)((u-d) alpha(theta,u-d) - u beta_H(theta,u))} )^{1/H}
//
// minimized over theta > 0. Everything is evaluated in the log domain. Data in bits, time in
// slots, theta in 1/bit.

#ifndef SNC_BOUNDS_HPP
#define SNC_BOUNDS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "snc/envelope_models.hpp"
#include "snc/theta_search.hpp"

namespace snc {

// Time horizon t of the bound: a finite number of slots, or the whole half-line [0, inf).
class Horizon {
public:
    static Horizon infinite() { return Horizon(); }
    static Horizon finite(std::int64_t slots);

    bool is_infinite() const { return !_slots.has_value(); }
    std::int64_t slots() const { return _slots.value(); }

    bool operator==(const Horizon&) const = default;

private:
    std::optional<std::int64_t> _slots;
};

class NetworkPath {
public:
    // Throws DomainError when hops is empty.
    NetworkPath(TrafficModel through, std::vector<ServiceModel> hops);

    const TrafficModel& through() const { return _through; }
    const std::vector<ServiceModel>& hops() const { return _hops; }
    int hop_count() const { return static_cast<int>(_hops.size()); }
    // true iff every hop is structurally identical to the first
    bool homogeneous() const { return _homogeneous; }

private:
    TrafficModel _through;
    std::vector<ServiceModel> _hops;
    bool _homogeneous;
};

// Controls evaluation of infinite-horizon series.
struct SeriesOptions {
    // Use the geometric closed form for time-invariant models; otherwise sum term by term.
    bool use_closed_form = true;
    double truncation_relative_tolerance = 1e-12;
    int truncation_consecutive_terms = 10;
    std::int64_t truncation_cap = 1'000'000;
};

// log of one series plus how it was obtained.
struct SeriesValue {
    double log_sum = 0.0;
    bool divergent = false;
    std::int64_t terms_used = 0; // 0 when the closed form was used
};

// log sum_{u=0..t} exp((theta u / 2)(alpha(theta,u) - beta(theta,u)))
SeriesValue log_hop_series(const TrafficModel& through, const ServiceModel& hop, Horizon horizon, double theta,
                           const SeriesOptions& options = {});

// log sum_{u=d..t} exp((theta/2)((u-d) alpha(theta,u-d) - u beta(theta,u)))
SeriesValue log_last_hop_delay_series(const TrafficModel& through, const ServiceModel& hop, std::int64_t delay,
                                      Horizon horizon, double theta, const SeriesOptions& options = {});

// Raw (unclamped) tail bound at one theta. A divergent series yields the trivial bound 1.
struct TailEvaluation {
    double value = 1.0;
    double log_value = 0.0;
    bool divergent = false;
    std::int64_t terms_used = 0;
};

TailEvaluation backlog_violation_at_theta(const NetworkPath& path, double backlog_bits, Horizon horizon, double theta,
                                          const SeriesOptions& options = {});

TailEvaluation delay_violation_at_theta(const NetworkPath& path, std::int64_t delay_slots, Horizon horizon,
                                        double theta, const SeriesOptions& options = {});

enum class BoundKind { backlog, delay };

const char* to_string(BoundKind kind);

struct BoundResult {
    BoundKind kind = BoundKind::delay;
    double value = 0.0;                 // bits (backlog) or slots (delay)
    double theta_star = 0.0;            // 1/bit
    double violation_probability = 1.0; // in [0, 1]
    bool stable_at_theta_star = false;
    std::int64_t truncation_horizon_used = 0; // 0 = analytic infinite-horizon sum
    std::vector<double> hop_margins;          // beta_i(theta*) - alpha(theta*), bits/slot
    bool clamped_to_zero = false;
    bool theta_at_boundary = false;
};

// Smallest backlog x(theta) = (2/theta) sum_i log S_i - (2H/theta) log(epsilon) at one theta; +inf if divergent.
double backlog_bound_at_theta(const NetworkPath& path, double epsilon, Horizon horizon, double theta,
                              const SeriesOptions& options = {});

// Smallest integer delay d with delay_violation_at_theta(d) <= epsilon; +inf if none exists.
double delay_bound_at_theta(const NetworkPath& path, double epsilon, Horizon horizon, double theta,
                            const SeriesOptions& options = {});

// Backlog/delay bounds violated with probability at most epsilon, minimized over theta.
// Throw InstabilityError when no theta is admissible; delay_bound throws HorizonTooSmallError when
// the series converge but no delay within a finite horizon reaches epsilon.
BoundResult backlog_bound(const NetworkPath& path, double epsilon, Horizon horizon, const ThetaSearchConfig& search,
                          const SeriesOptions& options = {});
BoundResult delay_bound(const NetworkPath& path, double epsilon, Horizon horizon, const ThetaSearchConfig& search,
                        const SeriesOptions& options = {});

// Violation probability bounds at a fixed threshold, minimized over theta.
BoundResult backlog_tail_bound(const NetworkPath& path, double backlog_bits, Horizon horizon,
                               const ThetaSearchConfig& search, const SeriesOptions& options = {});
BoundResult delay_tail_bound(const NetworkPath& path, std::int64_t delay_slots, Horizon horizon,
                             const ThetaSearchConfig& search, const SeriesOptions& options = {});

// N through flows across H identical hops of capacity C, each shared with M cross flows.
struct HomogeneousNetwork {
    std::uint64_t through_count = 1;
    TrafficModel through = TrafficModel::constant_rate(0.0);
    std::uint64_t cross_count = 0;
    TrafficModel cross = TrafficModel::constant_rate(0.0);
    double capacity = 0.0;
    int hops = 1;

    // Aggregate(N, through) over H Leftover(C, M, cross) hops.
    NetworkPath path() const;
};

// C - N alpha(theta) - M alpha_c(theta)
double stability_margin(std::uint64_t through_count, const TrafficModel& through, std::uint64_t cross_count,
                        const TrafficModel& cross, double capacity, double theta);

// (2H/theta) log(1 / (eps (1 - e^{-(theta/2) margin}))), +inf when margin <= 0, clamped at 0.
double closed_form_backlog_at_theta(const HomogeneousNetwork& net, double epsilon, double theta);
// (2H / (theta (C - M alpha_c))) log(1 / (eps (1 - e^{-(theta/2) margin}))), same conventions.
double closed_form_delay_at_theta(const HomogeneousNetwork& net, double epsilon, double theta);

BoundResult closed_form_backlog(const HomogeneousNetwork& net, double epsilon, const ThetaSearchConfig& search);
BoundResult closed_form_delay(const HomogeneousNetwork& net, double epsilon, const ThetaSearchConfig& search);

// Search range derived from the sources: theta_max keeps theta * (largest single-source peak per
// slot) at 700, theta_min is 1e-9 divided by the largest typical burst.
ThetaSearchConfig default_theta_search(const NetworkPath& path);

} // namespace snc

#endif // SNC_BOUNDS_HPP
