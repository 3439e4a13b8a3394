#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace optba {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Config-file / parameter violations; the CLI maps these to exit 1.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Hard BAConfig invariant violations (e > m, m > n, counts < 1).
class InvalidConfig : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class SpaceTooLarge : public Error {
public:
    using Error::Error;
};

// Every coordinate's neighbourhood collapses to its center.
class NeighborhoodEmpty : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// A multimodal surface over a non-enumerable space cannot be verified.
class ConstructionUnverifiable : public Error {
public:
    using Error::Error;
};

class ProtocolError : public Error {
public:
    using Error::Error;
};

class TimeoutError : public Error {
public:
    using Error::Error;
};

class ChildExited : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Evaluation failure with the offending parameter vector attached.
class ObjectiveFailure : public Error {
public:
    ObjectiveFailure(const std::string& message, std::vector<std::int64_t> params)
        : Error(compose(message, params)), params_(std::move(params)) {}

    explicit ObjectiveFailure(const std::string& message) : Error(message) {}

    const std::vector<std::int64_t>& params() const { return params_; }

private:
    static std::string compose(const std::string& message, const std::vector<std::int64_t>& params) {
        std::string out = message + " [params=(";
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (i > 0) out += ',';
            out += std::to_string(params[i]);
        }
        out += ")]";
        return out;
    }

    std::vector<std::int64_t> params_;
};

} // namespace optba
