#pragma once

#include <stdexcept>
#include <string>

namespace rslab {

// Base for every library error so callers can catch one type.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid constructor/operation arguments detected up front: bad dimension,
// nonpositive radius, p <= 1, malformed configuration, and the like.
struct PreconditionError : Error {
    using Error::Error;
};

// A point lies outside the closed ball where the kernel is defined.
struct DomainError : Error {
    using Error::Error;
};

// Kernel evaluated on (numerically) coincident points.
struct SingularityError : Error {
    using Error::Error;
};

// Grid spacing leaves no node inside the domain.
struct EmptyRuleError : Error {
    using Error::Error;
};

// Fields built on different grids were combined.
struct LayoutError : Error {
    using Error::Error;
};

// q >= 1 handed to machinery that needs a contraction.
struct NotAContractionError : Error {
    using Error::Error;
};

// Picard iteration missed the tolerance within its iteration budget.
struct NonConvergenceError : Error {
    NonConvergenceError(const std::string& msg, long sample = -1)
        : Error(msg), sample_index(sample) {}
    long sample_index;  // >= 0 when raised inside an ensemble run
};

// A statistical routine was invoked on data violating its hypotheses
// (inadmissible sample, contraction factor >= 1, ...).
struct HypothesisViolationError : Error {
    HypothesisViolationError(const std::string& msg, long sample = -1)
        : Error(msg), sample_index(sample) {}
    long sample_index;
};

// Sample standard deviation too small to standardize.
struct DegenerateDistributionError : Error {
    using Error::Error;
};

// Not enough iterates to measure a contraction ratio.
struct InsufficientHistoryError : Error {
    using Error::Error;
};

}  // namespace rslab
