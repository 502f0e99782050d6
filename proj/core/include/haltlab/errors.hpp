#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace haltlab {

// Malformed textual input (machine descriptions, guest assembly, observation
// literals). line is 1-based; 0 means "not line-addressable".
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message
                                  : message),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Malformed binary encoding; offset is the byte position of the failure.
class DecodeError : public std::runtime_error {
public:
    DecodeError(std::string message, std::size_t offset)
        : std::runtime_error("offset " + std::to_string(offset) + ": " + message),
          offset_(offset) {}

    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Structurally invalid value (machine spec invariant violations, bad
// configurations, non-executable guest programs).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Incompatible observations handed to lub; index names the first clash.
class ConflictError : public std::runtime_error {
public:
    ConflictError(std::string message, std::uint64_t index)
        : std::runtime_error(message + " at index " + std::to_string(index)),
          index_(index) {}

    std::uint64_t index() const { return index_; }

private:
    std::uint64_t index_;
};

// Scale guard tripped (e.g. machine enumeration beyond the default bounds).
class GuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace haltlab
