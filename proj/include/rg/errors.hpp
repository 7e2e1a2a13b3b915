#pragma once

#include <stdexcept>
#include <string>

namespace rg {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& message, std::size_t estimate)
      : std::runtime_error(message), estimate_(estimate) {}
  std::size_t estimate() const { return estimate_; }

 private:
  std::size_t estimate_;
};

class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when the auxiliary transition depends on player 2's action.
class BDependenceError : public std::runtime_error {
 public:
  BDependenceError(const std::string& message, std::string first, std::string second)
      : std::runtime_error(message), first_(std::move(first)), second_(std::move(second)) {}
  const std::string& first() const { return first_; }
  const std::string& second() const { return second_; }

 private:
  std::string first_;
  std::string second_;
};

}  // namespace rg
