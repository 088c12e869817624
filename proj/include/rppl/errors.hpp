#pragma once

#include <stdexcept>
#include <string>

namespace rppl {

/// Malformed input data (raster headers, CSV rows, binary files).
/// Carries a 1-based line number when the source is line oriented.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, long line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                    : message),
        line_(line) {}

  long line() const { return line_; }

 private:
  long line_;
};

/// Request outside the valid domain of an operation (out-of-extent sample,
/// out-of-band frequency, zero-length link, ...).
class DomainError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rppl
