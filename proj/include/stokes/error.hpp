#pragma once

#include <stdexcept>
#include <string>

namespace stokes {

enum class ErrorKind {
  Parse,           // malformed polynomial text / JSON
  Precondition,    // caller violated an operation precondition
  Domain,          // argument outside the admissible range
  Convergence,     // iterative method failed to converge
  Clearance,       // path or contour too close to a turning point
  DegeneratePair,  // coincident turning points used as a pair
  Branch,          // square root not single valued along a closed contour
  Trace,           // trajectory integration broke down
  Incomplete,      // Stokes graph has truncated trajectories
  NonGeneric,      // configuration violates a genericity assumption
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::Clearance: return "clearance";
    case ErrorKind::DegeneratePair: return "degenerate-pair";
    case ErrorKind::Branch: return "branch";
    case ErrorKind::Trace: return "trace";
    case ErrorKind::Incomplete: return "incomplete";
    case ErrorKind::NonGeneric: return "non-generic";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace stokes
