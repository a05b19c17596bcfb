#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecgfog {

// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

// Malformed input file; carries the 1-based line number of the offending row.
class FormatError : public Error {
public:
    FormatError(const std::string& msg, std::size_t line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class NoPlausiblePeaks : public Error {
public:
    using Error::Error;
};

class InsufficientBeats : public Error {
public:
    using Error::Error;
};

class EmptyPeriod : public Error {
public:
    EmptyPeriod(const std::string& msg, int period)
        : Error(msg), period_(period) {}
    int period() const { return period_; }

private:
    int period_;
};

// Counter discontinuity during ingest; the caller decides whether to abort
// or restart the sequence.
class SequenceGap : public Error {
public:
    SequenceGap(std::int64_t expected, std::int64_t got)
        : Error("sequence gap: expected counter " + std::to_string(expected) +
                ", got " + std::to_string(got)),
          expected_(expected),
          got_(got) {}
    std::int64_t expected() const { return expected_; }
    std::int64_t got() const { return got_; }

private:
    std::int64_t expected_;
    std::int64_t got_;
};

class IncompleteRange : public Error {
public:
    IncompleteRange(const std::string& msg, std::vector<std::int64_t> holes)
        : Error(msg), holes_(std::move(holes)) {}
    const std::vector<std::int64_t>& holes() const { return holes_; }

private:
    std::vector<std::int64_t> holes_;
};

class DegenerateSpan : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class DivisionByZero : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

}  // namespace ecgfog
