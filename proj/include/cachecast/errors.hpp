#pragma once

#include <stdexcept>
#include <string>

namespace cachecast {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad network/experiment configuration (CLI exit code 2).
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Structurally inconsistent inputs (mismatched dimensions, bad ids).
struct InvalidInputError : Error {
    explicit InvalidInputError(const std::string& msg) : Error(msg) {}
};

// A coloring violates an adjacency constraint.
struct ColoringValidityError : Error {
    explicit ColoringValidityError(const std::string& msg) : Error(msg) {}
};

// A receiver could not solve its linear system (CLI exit code 3).
struct DecodeError : Error {
    explicit DecodeError(const std::string& msg) : Error(msg) {}
};

// Input exceeds a hard size guard (e.g. exact oracle limits).
struct SizeError : Error {
    explicit SizeError(const std::string& msg) : Error(msg) {}
};

}  // namespace cachecast
