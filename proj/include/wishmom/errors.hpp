#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wishmom {

// Base class of everything the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad dimensions, out-of-range or duplicate indices, invalid parameters.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

// A Cholesky-style factorization hit a nonpositive pivot.
class NotPositiveDefiniteError : public Error {
public:
    NotPositiveDefiniteError(const std::string& what, std::size_t pivot)
        : Error(what), pivot_(pivot) {}

    // 0-based index of the failing pivot.
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

// Malformed covariance file. line/column are 1-based; 0 means "not applicable"
// (e.g. JSON errors report a byte offset inside the message instead).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// The exact pairing enumeration would exceed the configured budget.
class TractabilityError : public Error {
public:
    using Error::Error;
};

// Trace-notation calibration could not single out one convention.
class CalibrationError : public Error {
public:
    enum class Kind {
        no_match,   // no candidate agrees with the oracle: formula transcription defect
        ambiguous,  // several candidates agree: the scale matrix lacks discriminating structure
    };

    CalibrationError(const std::string& what, Kind kind) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace wishmom
