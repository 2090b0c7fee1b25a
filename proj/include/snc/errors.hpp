// errors.hpp - Exception types shared by the bound engine, simulator and scenario loader.

#ifndef SNC_ERRORS_HPP
#define SNC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace snc {

// Argument outside the mathematical domain of an operation (theta <= 0, epsilon outside (0,1], ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// No theta admits a convergent bound, i.e. C > N*alpha(theta) + M*alpha_c(theta) fails everywhere on the search range.
class InstabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A finite horizon is too short for any delay threshold to reach the requested violation probability.
class HorizonTooSmallError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or invalid scenario document. The message lists every problem found.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace snc

#endif // SNC_ERRORS_HPP
