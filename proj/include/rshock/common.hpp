#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rshock {

inline constexpr const char* kVersion = "0.1.0";

// Bad inputs (files, flags, dimensions). The CLI maps these to exit code 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unreadable/ill-formed file contents. Also exit code 2.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sampler failure mid-run (empty non-event set, non-finite draw). Exit code 3.
struct ChainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Date = std::chrono::sys_days;

// Parses a strict ISO-8601 calendar date (YYYY-MM-DD).
Date parse_date(const std::string& text);

std::string format_date(Date day);

// Shortest decimal representation that round-trips through strtod. Keeps
// CSV output both readable and bit-stable across reruns.
std::string format_double(double value);

}  // namespace rshock
