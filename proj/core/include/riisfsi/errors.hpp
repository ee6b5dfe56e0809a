#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace riisfsi {

/// Failure categories. The CLI maps each category to a distinct exit code.
enum class ErrorCategory {
  parameter = 2,
  generation = 3,
  validation = 4,
  shape = 5,
  inverted_element = 6,
  assembly = 7,
  nonconvergence = 8,
  linear_solve = 9,
  assumption_violation = 10,
  io = 11,
};

const char* to_string(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ErrorCategory::parameter, what) {}
};

class GenerationError : public Error {
 public:
  explicit GenerationError(const std::string& what) : Error(ErrorCategory::generation, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorCategory::validation, what) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ErrorCategory::shape, what) {}
};

class InvertedElementError : public Error {
 public:
  InvertedElementError(int cell, double jacobian);
  int cell() const noexcept { return cell_; }
  double jacobian() const noexcept { return jacobian_; }

 private:
  int cell_;
  double jacobian_;
};

class AssemblyError : public Error {
 public:
  AssemblyError(int cell, const std::string& what);
  int cell() const noexcept { return cell_; }

 private:
  int cell_;
};

class NonconvergenceError : public Error {
 public:
  NonconvergenceError(const std::string& what, std::vector<double> history)
      : Error(ErrorCategory::nonconvergence, what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

class LinearSolveError : public Error {
 public:
  explicit LinearSolveError(const std::string& what) : Error(ErrorCategory::linear_solve, what) {}
};

/// A valve lost contact with the structure: its weighted contact volume fell
/// below the configured threshold, so no attachment load can be defined.
class AssumptionViolation : public Error {
 public:
  AssumptionViolation(const std::string& valve, double volume, double threshold);
  const std::string& valve() const noexcept { return valve_; }

 private:
  std::string valve_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace riisfsi
