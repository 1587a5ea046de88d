#pragma once

#include <stdexcept>
#include <string>

namespace etdelay {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed caller input (bad shapes, missing samples, asymmetric matrices).
class InputError : public Error {
public:
    using Error::Error;
};

/// Parameters outside the region where a result exists (e.g. a <= b + alpha).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: divergence, delay-bound violation, non-finite values.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Configuration file problems. `path` names the offending field.
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& what)
        : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace etdelay
