#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace visrl {

// Caller supplied inconsistent or out-of-contract arguments.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A mask with no foreground pixel was asked for a box or point.
class EmptyMaskError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A metric has no defined value for the input (e.g. AP with zero ground truths).
class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed record in a JSONL input file. `line` is 1-based, 0 if unknown.
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace visrl
