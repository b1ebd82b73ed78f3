#pragma once

#include <stdexcept>
#include <string>

namespace kronopt {

// Input or model data violates a documented precondition or invariant.
// CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input text; carries the 1-based line where parsing failed.
class ParseError : public ValidationError {
public:
  ParseError(const std::string& what, int line)
      : ValidationError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

// Numerical or solver failure at runtime. CLI maps these to exit code 2.
class SolveError : public std::runtime_error {
public:
  explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

class ReductionError : public SolveError {
public:
  explicit ReductionError(const std::string& what) : SolveError(what) {}
};

}  // namespace kronopt
