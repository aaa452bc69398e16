#pragma once

#include <stdexcept>
#include <string>

namespace gho {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario text is malformed or uses an unknown key/kind.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed input that violates a domain invariant (M <= 0, t0 >= t1, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

class DegenerateBasis : public Error {
public:
    using Error::Error;
};

class IntegrationFailure : public Error {
public:
    using Error::Error;
};

class ZeroRho : public Error {
public:
    using Error::Error;
};

/// The kernel prefactor denominator vanishes: t_b sits on a focal point.
class CausticEncountered : public Error {
public:
    CausticEncountered(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// A packet has non-negligible amplitude at the grid edges, or a map pushes
/// support outside the grid.
class GridTooNarrow : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class LinearSolveFailure : public Error {
public:
    using Error::Error;
};

}  // namespace gho
