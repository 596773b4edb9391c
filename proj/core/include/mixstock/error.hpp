// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <stdexcept>
#include <string>

namespace mixstock {

// Malformed or inconsistent input data (dimension mismatch, bad file rows,
// out-of-range indices). Carries an optional 1-based line number.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what, long line = 0)
      : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

// A caller broke a documented precondition of an operation.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Compute could not proceed (e.g. non-finite posterior at initialization).
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mixstock
