#ifndef DSIM_ERRORS_HPP
#define DSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dsim {

// Base class for all errors raised by this library. Subclasses distinguish
// bad inputs (ValidationError, DomainError) from numerical conditions that
// depend on the evaluation point (ResonanceError, SingularityError, ...).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed object or configuration (wrong sizes, unsorted positions, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of an operation (k <= 0, dV = 0).
class DomainError : public Error {
public:
    using Error::Error;
};

// |M11| too small to invert: transmission amplitude pole at this k.
class SingularityError : public Error {
public:
    using Error::Error;
};

// Low-energy product formula evaluated at (or too close to) a zero of
// sin(k dL); the exact route has no pole there and should be used instead.
class ResonanceError : public Error {
public:
    using Error::Error;
};

// Finite-difference stencil too coarse for the local phase variation.
class StencilError : public Error {
public:
    using Error::Error;
};

// Quadrature self-check exceeded its tolerance.
class AccuracyError : public Error {
public:
    using Error::Error;
};

// Requested grid window does not contain the packet (or its passage).
class WindowError : public Error {
public:
    using Error::Error;
};

// Post-selected and incident states are (numerically) orthogonal.
class PostSelectionError : public Error {
public:
    using Error::Error;
};

// First-order pointer expansion invalid for the requested coupling.
class PerturbationError : public Error {
public:
    using Error::Error;
};

// Geometric series with convergence ratio >= 1.
class DivergenceError : public Error {
public:
    using Error::Error;
};

// File could not be opened or written.
class IoError : public Error {
public:
    using Error::Error;
};

// Superoscillation diagnostics requested outside the |L| > x0 regime.
class NotSuperoscillatoryError : public Error {
public:
    using Error::Error;
};

// Amplitude vanishes inside a differentiation stencil.
class InstabilityError : public Error {
public:
    using Error::Error;
};

} // namespace dsim

#endif
