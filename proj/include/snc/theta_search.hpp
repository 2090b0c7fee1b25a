// theta_search.hpp - One-dimensional minimization over the Chernoff parameter theta.

#ifndef SNC_THETA_SEARCH_HPP
#define SNC_THETA_SEARCH_HPP

#include <functional>

namespace snc {

struct ThetaSearchConfig {
    double theta_min = 1e-9;        // 1/bit
    double theta_max = 1.0;         // 1/bit
    int coarse_grid_points = 64;    // log-spaced
    double refine_tolerance = 1e-6; // relative bracket width that stops golden-section refinement

    // Throws DomainError unless 0 < theta_min < theta_max and coarse_grid_points >= 8.
    void validate() const;
};

struct ThetaOptimum {
    double theta = 0.0;
    double value = 0.0;
    bool at_upper_boundary = false; // best point sits on theta_max; the infimum may lie beyond the range
    bool at_lower_boundary = false;
};

// Minimizes objective over [theta_min, theta_max]: a log-spaced coarse grid locates the best
// point, then golden-section search in log(theta) refines within the neighbouring grid cells.
// Non-finite objective values mark inadmissible theta and are skipped. Ties resolve to the
// smallest theta. Throws InstabilityError when no grid point is admissible.
ThetaOptimum minimize_over_theta(const std::function<double(double)>& objective, const ThetaSearchConfig& config);

} // namespace snc

#endif // SNC_THETA_SEARCH_HPP
