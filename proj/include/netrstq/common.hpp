#pragma once

#include <stdexcept>
#include <string>

namespace netrstq {

// Malformed or inconsistent input (files, ids, shapes). CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure (non-finite likelihood, convergence guarantee broken). CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Line-addressed load failure: "<file>:<line>: <reason>".
class TsvError : public ValidationError {
 public:
  TsvError(const std::string& file, long line, const std::string& reason)
      : ValidationError(file + ":" + std::to_string(line) + ": " + reason),
        file_(file),
        line_(line) {}

  const std::string& file() const { return file_; }
  long line() const { return line_; }

 private:
  std::string file_;
  long line_;
};

}  // namespace netrstq
