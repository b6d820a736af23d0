#ifndef VDWFLOW_ERRORS_HPP
#define VDWFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vdwflow {

/// Base of all solver errors. `category()` is a stable machine-parsable tag;
/// `what()` carries human-readable diagnostics.
class Error : public std::runtime_error {
public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

private:
  std::string category_;
};

/// Density or (mass, volume) outside the admissible covolume range.
struct DomainError : Error {
  explicit DomainError(const std::string& m) : Error("DomainError", m) {}
};

/// Isotherm is monotone: no spinodal zone exists at this temperature.
struct NoSpinodal : Error {
  explicit NoSpinodal(const std::string& m) : Error("NoSpinodal", m) {}
};

/// An iterative solver exhausted its budget without meeting its tolerance.
struct ConvergenceFailure : Error {
  explicit ConvergenceFailure(const std::string& m) : Error("ConvergenceFailure", m) {}
};

/// Volume fractions are undefined because both phase densities coincide.
struct DegenerateMixture : Error {
  explicit DegenerateMixture(const std::string& m) : Error("DegenerateMixture", m) {}
};

/// Relaxation substep count would exceed the configured ceiling.
struct StiffnessOverflow : Error {
  explicit StiffnessOverflow(const std::string& m) : Error("StiffnessOverflow", m) {}
};

/// Equilibrium search ran out of budget with the residual above tolerance.
struct NotConverged : Error {
  explicit NotConverged(const std::string& m) : Error("NotConverged", m) {}
};

/// Negative sound-speed radicand: the cell left the hyperbolic region.
struct ComplexSoundSpeed : Error {
  explicit ComplexSoundSpeed(const std::string& m) : Error("ComplexSoundSpeed", m) {}
};

/// A grid cell or initial state violates the admissible density range.
struct InvalidState : Error {
  explicit InvalidState(const std::string& m) : Error("InvalidState", m) {}
};

/// Malformed configuration text (syntax, unknown key, bad number).
struct ParseError : Error {
  explicit ParseError(const std::string& m) : Error("ParseError", m) {}
};

/// Well-formed configuration violating a scenario invariant.
struct ValidationError : Error {
  explicit ValidationError(const std::string& m) : Error("ValidationError", m) {}
};

/// Filesystem failure while writing outputs.
struct IoError : Error {
  explicit IoError(const std::string& m) : Error("IoError", m) {}
};

}  // namespace vdwflow

#endif
