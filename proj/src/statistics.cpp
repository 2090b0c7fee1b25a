// statistics.cpp

#include "snc/statistics.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>

#include "snc/errors.hpp"

namespace snc {

void Histogram::add(std::int64_t value, std::uint64_t count)
{
    if (value < 0) {
        throw DomainError("histogram samples must be nonnegative");
    }
    if (count == 0) {
        return;
    }
    if (value < kDenseLimit) {
        const auto idx = static_cast<std::size_t>(value);
        if (idx >= _dense.size()) {
            _dense.resize(std::max<std::size_t>(idx + 1, _dense.size() * 2), 0);
        }
        _dense[idx] += count;
    } else {
        _sparse[value] += count;
    }
    _total += count;
}

void Histogram::merge(const Histogram& other)
{
    for (std::size_t i = 0; i < other._dense.size(); ++i) {
        if (other._dense[i] != 0) {
            add(static_cast<std::int64_t>(i), other._dense[i]);
        }
    }
    for (const auto& [v, c] : other._sparse) {
        add(v, c);
    }
}

std::uint64_t Histogram::count_above(double threshold) const
{
    std::uint64_t n = 0;
    const auto first = threshold < 0.0 ? std::size_t{0} : static_cast<std::size_t>(std::floor(threshold)) + 1;
    for (std::size_t i = first; i < _dense.size(); ++i) {
        n += _dense[i];
    }
    for (auto it = _sparse.upper_bound(static_cast<std::int64_t>(std::floor(std::max(threshold, -1.0))));
         it != _sparse.end(); ++it) {
        n += it->second;
    }
    return n;
}

std::int64_t Histogram::max_value() const
{
    if (!_sparse.empty()) {
        return _sparse.rbegin()->first;
    }
    for (std::size_t i = _dense.size(); i-- > 0;) {
        if (_dense[i] != 0) {
            return static_cast<std::int64_t>(i);
        }
    }
    return 0;
}

std::int64_t Histogram::upper_quantile(double tail) const
{
    // walk down from the top until more than tail*total samples lie strictly above
    const double allowed = tail * static_cast<double>(_total);
    const auto entries_sorted = entries();
    std::uint64_t above = 0;
    for (auto it = entries_sorted.rbegin(); it != entries_sorted.rend(); ++it) {
        if (static_cast<double>(above + it->second) > allowed) {
            return it->first;
        }
        above += it->second;
    }
    return 0;
}

std::vector<std::pair<std::int64_t, std::uint64_t>> Histogram::entries() const
{
    std::vector<std::pair<std::int64_t, std::uint64_t>> out;
    for (std::size_t i = 0; i < _dense.size(); ++i) {
        if (_dense[i] != 0) {
            out.emplace_back(static_cast<std::int64_t>(i), _dense[i]);
        }
    }
    for (const auto& e : _sparse) {
        out.push_back(e);
    }
    return out;
}

double clopper_pearson_upper(std::uint64_t successes, std::uint64_t trials, double confidence)
{
    if (trials == 0 || successes > trials) {
        throw DomainError("Clopper-Pearson limit needs 0 <= successes <= trials and trials > 0");
    }
    if (successes == trials) {
        return 1.0;
    }
    return boost::math::ibeta_inv(static_cast<double>(successes + 1), static_cast<double>(trials - successes),
                                  confidence);
}

double clopper_pearson_lower(std::uint64_t successes, std::uint64_t trials, double confidence)
{
    if (trials == 0 || successes > trials) {
        throw DomainError("Clopper-Pearson limit needs 0 <= successes <= trials and trials > 0");
    }
    if (successes == 0) {
        return 0.0;
    }
    return boost::math::ibeta_inv(static_cast<double>(successes), static_cast<double>(trials - successes + 1),
                                  1.0 - confidence);
}

namespace {

TailEstimate make_estimate(std::uint64_t k, std::uint64_t n, double confidence)
{
    if (n == 0) {
        throw DomainError("empirical tail needs at least one sample");
    }
    TailEstimate e;
    e.exceedances = k;
    e.samples = n;
    e.frequency = static_cast<double>(k) / static_cast<double>(n);
    e.upper_limit = clopper_pearson_upper(k, n, confidence);
    e.lower_limit = clopper_pearson_lower(k, n, confidence);
    return e;
}

} // namespace

TailEstimate empirical_tail(std::span<const double> samples, double threshold, double confidence)
{
    const auto k = static_cast<std::uint64_t>(
        std::count_if(samples.begin(), samples.end(), [&](double s) { return s > threshold; }));
    return make_estimate(k, samples.size(), confidence);
}

TailEstimate empirical_tail(const Histogram& samples, double threshold, double confidence)
{
    return make_estimate(samples.count_above(threshold), samples.total(), confidence);
}

} // namespace snc
