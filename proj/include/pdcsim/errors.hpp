#pragma once

#include <stdexcept>
#include <string>

namespace pdcsim {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Configuration rejected before any computation (bad key, bad value, schema
/// violation). CLI maps this to exit code 1.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Flux ratio outside [0, 0.5): the junction inductance formula degenerates.
class FluxOutOfRange : public Error {
public:
    using Error::Error;
};

/// Mode scan found fewer sign changes than requested modes.
class RootNotFound : public Error {
public:
    using Error::Error;
};

/// Relative-amplitude denominator vanished at a refined root: the two
/// resonator segments decouple and the amplitude ratio is not defined.
class DegenerateMode : public Error {
public:
    using Error::Error;
};

/// Critical coupling is undefined at zero drive.
class ZeroDrive : public Error {
public:
    using Error::Error;
};

/// The adaptive step controller stalled (step size driven below resolution).
class ToleranceFailure : public Error {
public:
    using Error::Error;
};

/// A quantity that must be non-negative (a variance) fell below -1e-6, or a
/// real-by-construction combination acquired a large imaginary residue.
class NonPhysical : public Error {
public:
    using Error::Error;
};

} // namespace pdcsim
