#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsgp {

// Nonpositive scale, lengthscale or variance.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Vector/matrix sizes that do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Latent state handed to an operation in the wrong coordinate frame.
class FrameError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Factorization failure, non-finite objective, and similar.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration, CSV, model or sample file.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class OptimizationError : public NumericalError {
 public:
  OptimizationError(const std::string& what, std::vector<std::string> diagnostics)
      : NumericalError(what), diagnostics_(std::move(diagnostics)) {}
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

class SamplingError : public NumericalError {
 public:
  SamplingError(const std::string& what, std::vector<std::string> diagnostics)
      : NumericalError(what), diagnostics_(std::move(diagnostics)) {}
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

}  // namespace nsgp
