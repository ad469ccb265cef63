#ifndef QUADTWIST_ERROR_HPP
#define QUADTWIST_ERROR_HPP

#include <stdexcept>
#include <string>

namespace quadtwist
{

// Base class for every failure raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Input outside a table or sieve bound.
class BoundError : public Error
{
public:
    using Error::Error;
};

// Invalid parameter (violated precondition).
class ParameterError : public Error
{
public:
    using Error::Error;
};

// Quadrature, series or truncation failed to reach its tolerance.
class ConvergenceError : public Error
{
public:
    using Error::Error;
};

// Argument too close to a pole.
class SingularityError : public Error
{
public:
    using Error::Error;
};

// Requested work exceeds the configured resource budget.
class BudgetError : public Error
{
public:
    using Error::Error;
};

// Evaluation point outside the region where a formula is valid.
class DomainError : public Error
{
public:
    using Error::Error;
};

// Contour specification violates its enclosure invariants.
class ContourError : public Error
{
public:
    using Error::Error;
};

// Nearly coincident shifts on a path that needs them separated.
class DegeneracyError : public Error
{
public:
    using Error::Error;
};

} // namespace quadtwist

#endif
