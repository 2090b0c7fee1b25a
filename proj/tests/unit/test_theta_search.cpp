#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "snc/errors.hpp"
#include "snc/log_sum_exp.hpp"
#include "snc/theta_search.hpp"

using namespace snc;

TEST_CASE("minimize_over_theta on a quadratic")
{
    ThetaSearchConfig c;
    c.theta_min = 0.1;
    c.theta_max = 10.0;
    const ThetaOptimum r = minimize_over_theta([](double t) { return (t - 1.0) * (t - 1.0) + 3.0; }, c);
    CHECK(r.theta == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.value == doctest::Approx(3.0).epsilon(1e-9));
    CHECK_FALSE(r.at_upper_boundary);
    CHECK_FALSE(r.at_lower_boundary);
}

TEST_CASE("minimize_over_theta boundary flags")
{
    ThetaSearchConfig c;
    c.theta_min = 0.1;
    c.theta_max = 10.0;
    const ThetaOptimum dec = minimize_over_theta([](double t) { return 1.0 / t; }, c);
    CHECK(dec.theta == doctest::Approx(10.0));
    CHECK(dec.at_upper_boundary);
    const ThetaOptimum inc = minimize_over_theta([](double t) { return t; }, c);
    CHECK(inc.theta == doctest::Approx(0.1));
    CHECK(inc.at_lower_boundary);
}

TEST_CASE("minimize_over_theta ties and inadmissible points")
{
    ThetaSearchConfig c;
    c.theta_min = 0.1;
    c.theta_max = 10.0;
    CHECK(minimize_over_theta([](double) { return 2.0; }, c).theta == doctest::Approx(0.1));

    const double inf = std::numeric_limits<double>::infinity();
    // admissible only below 2: the minimum sits at the edge of the admissible region
    const ThetaOptimum r = minimize_over_theta([&](double t) { return t < 2.0 ? -t : inf; }, c);
    CHECK(r.value <= -1.8);
    CHECK(r.theta < 2.0);

    CHECK_THROWS_AS(minimize_over_theta([&](double) { return inf; }, c), InstabilityError);
    CHECK_THROWS_AS(minimize_over_theta([](double) { return std::nan(""); }, c), InstabilityError);
}

TEST_CASE("minimize_over_theta is deterministic and catches a narrow well")
{
    ThetaSearchConfig c;
    c.theta_min = 1e-6;
    c.theta_max = 1e3;
    auto f = [](double t) {
        const double z = std::log(t / 0.037);
        return 1.0 - std::exp(-z * z * 4.0) + 0.01 * std::abs(std::log(t));
    };
    const ThetaOptimum a = minimize_over_theta(f, c);
    const ThetaOptimum b = minimize_over_theta(f, c);
    CHECK(a.theta == b.theta);
    CHECK(a.value == b.value);
    CHECK(a.theta == doctest::Approx(0.037).epsilon(0.05));
}

TEST_CASE("ThetaSearchConfig validation")
{
    ThetaSearchConfig c;
    CHECK_NOTHROW(c.validate());
    c.theta_min = 2.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = ThetaSearchConfig{};
    c.theta_min = 0.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = ThetaSearchConfig{};
    c.coarse_grid_points = 7;
    CHECK_THROWS_AS(c.validate(), DomainError);
    CHECK_THROWS_AS(minimize_over_theta([](double t) { return t; }, c), DomainError);
}

TEST_CASE("log_sum_exp")
{
    const std::vector<double> terms{std::log(1.0), std::log(2.0), std::log(3.0)};
    CHECK(log_sum_exp(terms) == doctest::Approx(std::log(6.0)).epsilon(1e-15));
    const std::vector<double> huge{1000.0, 1000.0};
    CHECK(log_sum_exp(huge) == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));
    const std::vector<double> tiny{-1000.0, -1001.0};
    CHECK(log_sum_exp(tiny) == doctest::Approx(-1000.0 + std::log1p(std::exp(-1.0))).epsilon(1e-15));
    CHECK(log_sum_exp({}) == -std::numeric_limits<double>::infinity());

    LogSumExp acc;
    acc.add(-std::numeric_limits<double>::infinity());
    CHECK(acc.empty());
    acc.add(0.0);
    CHECK(acc.value() == 0.0);

    CHECK(log_geometric_series(-0.5) == doctest::Approx(std::log(1.0 / (1.0 - std::exp(-0.5)))).epsilon(1e-15));
    CHECK(log_geometric_series(-1e-12) == doctest::Approx(std::log(1e12)).epsilon(1e-9));
}
