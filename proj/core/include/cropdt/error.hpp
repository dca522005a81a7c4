#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cropdt {

/// Bad input data: malformed files, negative rainfall, missing months under a
/// strict policy. Carries the 1-based source line when one is known.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Caller violated an operation's precondition (wrong sizes, bad parameters).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cropdt
