#pragma once

#include <stdexcept>
#include <string>

namespace toda {

// Root of everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (poles, branch lines).
class DomainError : public Error {
public:
    using Error::Error;
};

// Bad user input: parameters violating documented invariants.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A determinant truncation or series that did not settle.
class TruncationError : public Error {
public:
    using Error::Error;
};

// Wrong number of zeros, zeros on a boundary line, etc.
class StructuralError : public Error {
public:
    using Error::Error;
};

// Two routes to the same quantity disagree beyond tolerance.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

// Iterative solver failed to converge.
class SolverError : public Error {
public:
    using Error::Error;
};

// Quadrature grid too coarse or too short.
class DiscretizationError : public Error {
public:
    using Error::Error;
};

// Evaluation at a genuine pole.
class PoleError : public DomainError {
public:
    PoleError(const std::string& what, double residue) : DomainError(what), residue_(residue) {}
    double residue() const { return residue_; }

private:
    double residue_;
};

}  // namespace toda
