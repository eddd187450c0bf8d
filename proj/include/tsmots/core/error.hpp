#pragma once

#include <stdexcept>
#include <string>

namespace tsmots {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Operands live on different frame grids.
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

/// An operation that requires foreground pixels got an empty mask.
class EmptyMaskError : public Error {
public:
    explicit EmptyMaskError(const std::string& msg) : Error(msg) {}
};

/// Malformed RLE string or counts inconsistent with the grid.
class CodecError : public Error {
public:
    explicit CodecError(const std::string& msg) : Error(msg) {}
};

/// Invalid configuration value.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Scene generation could not satisfy its constraints.
class GenerationError : public Error {
public:
    explicit GenerationError(const std::string& msg) : Error(msg) {}
};

/// File or directory level failure.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// An internal invariant was violated; indicates a bug, not bad input.
class InvariantError : public Error {
public:
    explicit InvariantError(const std::string& msg) : Error(msg) {}
};

} // namespace tsmots
