#pragma once

#include <stdexcept>

namespace qmod {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotHermitian : Error {
    using Error::Error;
};
struct NotPSD : Error {
    using Error::Error;
};
struct Singular : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct IndexOutOfRange : Error {
    using Error::Error;
};
struct NotCyclic : Error {
    using Error::Error;
};
struct NotSeparating : Error {
    using Error::Error;
};
struct IllConditioned : Error {
    using Error::Error;
};
struct InvalidDensity : Error {
    using Error::Error;
};
struct NotNormalized : Error {
    using Error::Error;
};
struct InvalidQuantumNumbers : Error {
    using Error::Error;
};
struct QuadratureNotConverged : Error {
    using Error::Error;
};
struct NegativeParameter : Error {
    using Error::Error;
};
struct Unsupported : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

} // namespace qmod
