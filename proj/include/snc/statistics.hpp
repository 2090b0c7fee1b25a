// statistics.hpp - Sample histograms and empirical tail frequencies with exact binomial limits.

#ifndef SNC_STATISTICS_HPP
#define SNC_STATISTICS_HPP

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace snc {

// Multiset of nonnegative integer samples. Small values are counted densely, large ones sparsely.
class Histogram {
public:
    void add(std::int64_t value, std::uint64_t count = 1);
    void merge(const Histogram& other);

    std::uint64_t total() const { return _total; }
    bool empty() const { return _total == 0; }
    // number of samples strictly greater than threshold
    std::uint64_t count_above(double threshold) const;
    std::int64_t max_value() const;
    // smallest v with P{X > v} <= tail
    std::int64_t upper_quantile(double tail) const;
    // (value, count) pairs in increasing value order
    std::vector<std::pair<std::int64_t, std::uint64_t>> entries() const;

    friend bool operator==(const Histogram& a, const Histogram& b) { return a.entries() == b.entries(); }

private:
    static constexpr std::int64_t kDenseLimit = std::int64_t{1} << 20;
    std::vector<std::uint64_t> _dense;
    std::map<std::int64_t, std::uint64_t> _sparse;
    std::uint64_t _total = 0;
};

struct TailEstimate {
    double frequency = 0.0;
    double upper_limit = 1.0; // one-sided Clopper-Pearson upper limit
    double lower_limit = 0.0; // one-sided Clopper-Pearson lower limit
    std::uint64_t exceedances = 0;
    std::uint64_t samples = 0;
};

// One-sided Clopper-Pearson limits for k successes in n trials at the given confidence.
double clopper_pearson_upper(std::uint64_t successes, std::uint64_t trials, double confidence = 0.95);
double clopper_pearson_lower(std::uint64_t successes, std::uint64_t trials, double confidence = 0.95);

// Fraction of samples strictly exceeding threshold with 95% one-sided limits.
// Throws DomainError on an empty sample set.
TailEstimate empirical_tail(std::span<const double> samples, double threshold, double confidence = 0.95);
TailEstimate empirical_tail(const Histogram& samples, double threshold, double confidence = 0.95);

} // namespace snc

#endif // SNC_STATISTICS_HPP
