#pragma once

#include <stdexcept>
#include <string>

namespace isingeq {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (e.g. |m| > 1).
class DomainError : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class OutOfTabulatedRange : public Error {
public:
    using Error::Error;
};

class InvalidNoiseTable : public Error {
public:
    using Error::Error;
};

class InvalidDistribution : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class TooLarge : public Error {
public:
    using Error::Error;
};

class UnknownDegreeLabel : public Error {
public:
    using Error::Error;
};

// Numerical failures: a solver ran out of iterations before meeting its
// tolerance. The CLI maps these to exit code 3.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

class ToleranceNotReached : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

}  // namespace isingeq
