#pragma once

#include <stdexcept>
#include <string>

namespace dispersal {

// Base of every error the library raises. The CLI maps each subclass to an
// exit status.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid input: bad grid, malformed coefficients, dimension mismatch.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Solver trouble: non-convergence, explicit-step overshoot, singular pivot.
class NumericalError : public Error {
public:
    using Error::Error;
};

// A modelling hypothesis required by the requested analysis does not hold.
class HypothesisError : public Error {
public:
    using Error::Error;
};

}  // namespace dispersal
