/**
 * @file error.hpp
 * @brief Exception hierarchy shared by all granuloma modules.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace granuloma {

/// Base class; everything thrown by the library derives from this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on parameters or inputs was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Some field left the blow-up threshold (or became non-finite).
class BlowUpError : public Error {
public:
    using Error::Error;
};

/// The stable timestep fell below the configured floor.
class TimestepCollapse : public Error {
public:
    using Error::Error;
};

/// The log-linear fit had nothing to work with.
class NoExponentialRegime : public Error {
public:
    using Error::Error;
};

/// Config file problems; the message carries the line number.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace granuloma
