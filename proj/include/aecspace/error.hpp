#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aecspace {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VocabularyError : public Error {
 public:
  using Error::Error;
};

// An enumeration or search needs more work than the configured budget allows.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at " + std::to_string(line) + ":" + std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace aecspace
