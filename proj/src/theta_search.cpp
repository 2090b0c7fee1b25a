// theta_search.cpp - Coarse log grid + golden-section refinement.

#include "snc/theta_search.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "snc/errors.hpp"

namespace snc {

void ThetaSearchConfig::validate() const
{
    if (!(theta_min > 0.0) || !(theta_max > theta_min) || !std::isfinite(theta_max)) {
        throw DomainError("theta search range must satisfy 0 < theta_min < theta_max");
    }
    if (coarse_grid_points < 8) {
        throw DomainError("theta search needs at least 8 coarse grid points");
    }
    if (!(refine_tolerance > 0.0)) {
        throw DomainError("theta refine tolerance must be positive");
    }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double admissible(double v)
{
    return std::isfinite(v) ? v : kInf;
}

} // namespace

ThetaOptimum minimize_over_theta(const std::function<double(double)>& objective, const ThetaSearchConfig& config)
{
    config.validate();
    const int n = config.coarse_grid_points;
    const double log_lo = std::log(config.theta_min);
    const double log_hi = std::log(config.theta_max);
    const double step = (log_hi - log_lo) / (n - 1);

    std::vector<double> log_grid(n);
    int best = -1;
    double best_value = kInf;
    for (int i = 0; i < n; ++i) {
        log_grid[i] = (i == n - 1) ? log_hi : log_lo + step * i;
        const double theta = (i == 0) ? config.theta_min : (i == n - 1 ? config.theta_max : std::exp(log_grid[i]));
        const double v = admissible(objective(theta));
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    if (best < 0) {
        throw InstabilityError("no admissible theta in [" + std::to_string(config.theta_min) + ", " +
                               std::to_string(config.theta_max) +
                               "]: the stability condition C > N*alpha(theta) + M*alpha_c(theta) "
                               "fails or the bound diverges for every theta");
    }

    ThetaOptimum out;
    out.theta = std::exp(log_grid[best]);
    if (best == 0) {
        out.theta = config.theta_min;
    } else if (best == n - 1) {
        out.theta = config.theta_max;
    }
    out.value = best_value;

    // Golden-section in log(theta) over the two cells adjacent to the grid minimum.
    double a = log_grid[best > 0 ? best - 1 : 0];
    double b = log_grid[best < n - 1 ? best + 1 : n - 1];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    auto eval = [&](double log_theta) { return admissible(objective(std::exp(log_theta))); };

    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    // Bracket width in log space approximates relative width in theta.
    for (int iter = 0; iter < 200 && (b - a) > config.refine_tolerance; ++iter) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    const double candidates[2][2] = {{c, fc}, {d, fd}};
    for (const auto& cand : candidates) {
        const double theta = std::exp(cand[0]);
        if (cand[1] < out.value || (cand[1] == out.value && theta < out.theta)) {
            out.value = cand[1];
            out.theta = theta;
        }
    }

    const double edge = config.refine_tolerance * 10.0;
    out.at_upper_boundary = std::log(out.theta) >= log_hi - edge;
    out.at_lower_boundary = std::log(out.theta) <= log_lo + edge;
    return out;
}

} // namespace snc
