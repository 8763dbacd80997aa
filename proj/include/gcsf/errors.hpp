#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gcsf {

/// Base class for all library failures that are not plain argument errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A speed law produced a non-finite value, or was asked outside its domain.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, double abscissa)
        : Error(what + " (at x = " + std::to_string(abscissa) + ")"), abscissa_(abscissa) {}

    double abscissa() const noexcept { return abscissa_; }

private:
    double abscissa_;
};

/// h'' + h <= 0 (or k <= 0) somewhere on the grid.
class ConvexityLossError : public Error {
public:
    ConvexityLossError(const std::string& what, std::size_t node)
        : Error(what + " (node " + std::to_string(node) + ")"), node_(node) {}

    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

/// Curvature profile violates the closure conditions beyond tolerance.
class NotClosedError : public Error {
public:
    using Error::Error;
};

/// k_max / k_min too large for the radii and Hausdorff computations.
class DegenerateProfileError : public Error {
public:
    using Error::Error;
};

/// Speed law fails (H1)/(H2) on the probe range a run will visit.
class HypothesisError : public Error {
public:
    using Error::Error;
};

}  // namespace gcsf
