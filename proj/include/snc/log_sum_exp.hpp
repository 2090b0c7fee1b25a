// log_sum_exp.hpp - Streaming log-domain accumulation of positive series.

#ifndef SNC_LOG_SUM_EXP_HPP
#define SNC_LOG_SUM_EXP_HPP

#include <cmath>
#include <limits>
#include <span>

namespace snc {

// Accumulates log(sum_i exp(a_i)) one term at a time without overflow.
// The running maximum is kept as the reference point; the partial sum is rescaled when it moves.
class LogSumExp {
public:
    void add(double log_term)
    {
        if (log_term == -std::numeric_limits<double>::infinity()) {
            return;
        }
        if (_empty) {
            _max = log_term;
            _scaled = 1.0;
            _empty = false;
        } else if (log_term <= _max) {
            _scaled += std::exp(log_term - _max);
        } else {
            _scaled = _scaled * std::exp(_max - log_term) + 1.0;
            _max = log_term;
        }
    }

    // log of the accumulated sum; -inf when nothing was added
    double value() const
    {
        if (_empty) {
            return -std::numeric_limits<double>::infinity();
        }
        return _max + std::log(_scaled);
    }

    bool empty() const { return _empty; }

private:
    double _max = 0.0;
    double _scaled = 0.0;
    bool _empty = true;
};

inline double log_sum_exp(std::span<const double> log_terms)
{
    LogSumExp acc;
    for (double a : log_terms) {
        acc.add(a);
    }
    return acc.value();
}

// log(1 / (1 - e^{g})) for g < 0: the log of the geometric series sum_{u>=0} e^{u g}.
inline double log_geometric_series(double g)
{
    return -std::log(-std::expm1(g));
}

} // namespace snc

#endif // SNC_LOG_SUM_EXP_HPP
