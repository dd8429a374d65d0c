#pragma once

#include <stdexcept>
#include <string>

namespace binaq {

// Base class for all toolkit errors. Subclasses map onto CLI exit codes:
// config/usage -> 1, data/shape/io/format -> 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

class FormatError : public Error {
public:
    explicit FormatError(const std::string& what) : Error(what) {}
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

// Input is structurally valid but the operation is not defined on it
// (e.g. no foreground pixels to score).
class DegenerateInputError : public Error {
public:
    explicit DegenerateInputError(const std::string& what) : Error(what) {}
};

// A metric's normalizer vanished (e.g. DRD with a uniform ground truth).
class UndefinedMetricError : public Error {
public:
    explicit UndefinedMetricError(const std::string& what) : Error(what) {}
};

// Dataset matching / evaluation input problems.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(what) {}
};

class UnsupportedOperationError : public Error {
public:
    explicit UnsupportedOperationError(const std::string& what) : Error(what) {}
};

} // namespace binaq
