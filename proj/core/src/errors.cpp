#include "riisfsi/errors.hpp"

#include <sstream>

namespace riisfsi {

const char* to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::parameter: return "parameter";
    case ErrorCategory::generation: return "generation";
    case ErrorCategory::validation: return "validation";
    case ErrorCategory::shape: return "shape";
    case ErrorCategory::inverted_element: return "inverted-element";
    case ErrorCategory::assembly: return "assembly";
    case ErrorCategory::nonconvergence: return "nonconvergence";
    case ErrorCategory::linear_solve: return "linear-solve";
    case ErrorCategory::assumption_violation: return "assumption-violation";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

namespace {

std::string inverted_message(int cell, double jacobian) {
  std::ostringstream os;
  os << "inverted element: cell " << cell << " has J = " << jacobian;
  return os.str();
}

std::string assumption_message(const std::string& valve, double volume, double threshold) {
  std::ostringstream os;
  os << "valve '" << valve << "' is detached from the structure: contact volume " << volume
     << " <= " << threshold;
  return os.str();
}

}  // namespace

InvertedElementError::InvertedElementError(int cell, double jacobian)
    : Error(ErrorCategory::inverted_element, inverted_message(cell, jacobian)),
      cell_(cell),
      jacobian_(jacobian) {}

AssemblyError::AssemblyError(int cell, const std::string& what)
    : Error(ErrorCategory::assembly, "cell " + std::to_string(cell) + ": " + what), cell_(cell) {}

AssumptionViolation::AssumptionViolation(const std::string& valve, double volume,
                                         double threshold)
    : Error(ErrorCategory::assumption_violation, assumption_message(valve, volume, threshold)),
      valve_(valve) {}

}  // namespace riisfsi
