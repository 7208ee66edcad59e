#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace exotest {

// Malformed input text. `line()` is 1-based; 0 when the error is not tied to
// a particular line (e.g. an empty file).
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// The data are well-formed but cannot support the estimator, e.g. a
// (x,z) stratum with no events, or a bootstrap that keeps degenerating.
class DegenerateData : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace exotest
