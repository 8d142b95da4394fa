#pragma once

#include <stdexcept>
#include <string>

namespace fraclab {

/// Assembly-time contract violation (ellipticity floor, layout mismatch).
class AssemblyError : public std::runtime_error {
public:
    explicit AssemblyError(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative solver failed to converge within its cap, or a solve broke down.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Operation applied outside the operator's domain (e.g. nonpositive spectrum).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Object is not in the state the operation requires.
class InvalidState : public std::runtime_error {
public:
    explicit InvalidState(const std::string& what) : std::runtime_error(what) {}
};

/// Too few usable samples for a fit.
class InsufficientData : public std::runtime_error {
public:
    explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fraclab
