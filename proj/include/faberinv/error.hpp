#pragma once

#include <stdexcept>
#include <string>

namespace faberinv {

/// Broad failure classes; the CLI maps them onto exit codes.
enum class ErrorKind {
  Input,              // malformed or out-of-range user input
  Domain,             // evaluation point outside the admissible region
  Geometry,           // self-intersecting or mis-oriented curve
  Contrast,           // |lambda| < 1/2, sigma0 == 1, unsupported extreme contrast
  Compatibility,      // extreme-contrast data with non-zero mean
  DataInconsistency,  // measured tensors contradict the requested model
  Resolution,         // truncation too small for the requested order
  Numerical           // singular systems, non-convergence
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Input: return "input";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::Contrast: return "contrast";
    case ErrorKind::Compatibility: return "compatibility";
    case ErrorKind::DataInconsistency: return "data-inconsistency";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Numerical: return "numerical";
  }
  return "unknown";
}

}  // namespace faberinv
