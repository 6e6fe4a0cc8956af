#pragma once

#include <stdexcept>
#include <string>

namespace otrisk {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A caller-supplied value violates a documented precondition.
class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& what) : Error(what) {}
};

/// Malformed external data (CSV / JSON).  Carries the 1-based row (or line)
/// at which parsing failed, 0 when no row applies.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row)
        : Error(row ? what + " (row " + std::to_string(row) + ")" : what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// A requested strategy / model tag has no registered implementation.
class Unsupported : public Error {
public:
    explicit Unsupported(const std::string& what) : Error(what) {}
};

/// Numerical failure inside an iterative solver (singular basis, iteration
/// cap, failed certificate).  Message carries diagnostics.
class SolverError : public Error {
public:
    explicit SolverError(const std::string& what) : Error(what) {}
};

/// The dual objective is +infinity on the whole search range (the integrand
/// grows faster than the transport cost).
class UnboundedDual : public Error {
public:
    explicit UnboundedDual(const std::string& what) : Error(what) {}
};

/// A coupling failed feasibility (marginal or budget) checks.
class InfeasibleCoupling : public Error {
public:
    explicit InfeasibleCoupling(const std::string& what) : Error(what) {}
};

/// A user-supplied projection map violates its contract
/// (projection(x) must land in the target set at cost equal to the set distance).
class InvalidProjection : public Error {
public:
    explicit InvalidProjection(const std::string& what) : Error(what) {}
};

/// A discretization is too coarse to resolve a requested feature
/// (e.g. a drawdown smaller than the grid tolerance).
class ResolutionError : public Error {
public:
    explicit ResolutionError(const std::string& what) : Error(what) {}
};

} // namespace otrisk
