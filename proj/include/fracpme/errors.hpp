#pragma once

#include <stdexcept>
#include <string>

namespace fracpme {

/// Base class for all numerical failures raised by the library.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature did not reach the requested tolerance. Carries the best
/// estimate and the error bound at the point of giving up.
class quad_error : public numerical_error {
public:
    quad_error(const std::string& msg, double estimate, double error_bound)
        : numerical_error(msg), estimate(estimate), error_bound(error_bound) {}
    double estimate;
    double error_bound;
};

/// Newton iteration failed to converge. Carries the last iterate.
class newton_error : public numerical_error {
public:
    newton_error(const std::string& msg, double last_iterate, int iterations)
        : numerical_error(msg), last_iterate(last_iterate), iterations(iterations) {}
    double last_iterate;
    int iterations;
};

/// The explicit recurrence produced a nonpositive bracket; the scheme would
/// collapse onto the trivial solution.
class collapse_error : public numerical_error {
public:
    collapse_error(const std::string& msg, int step)
        : numerical_error(msg), step(step) {}
    int step;
};

/// A bracketing search found no sign change.
class bracket_error : public numerical_error {
public:
    using numerical_error::numerical_error;
};

/// Wetting front could not be extracted (nonpositive boundary derivative,
/// front at the domain edge, ...).
class front_error : public numerical_error {
public:
    using numerical_error::numerical_error;
};

}  // namespace fracpme
