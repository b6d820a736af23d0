#ifndef VDWFLOW_THERMO_HPP
#define VDWFLOW_THERMO_HPP

#include <cmath>
#include <sstream>
#include <string>

#include "vdwflow/errors.hpp"

// Isothermal van der Waals equation of state.
//
// The extensive Helmholtz free energy of a single fluid of mass M in a
// volume V at fixed temperature T is
//
//   E(M,V) = -a M^2 / V + R T ( M log(M / (V - M b)) - M ),
//
// with attraction a, covolume b and gas constant R. E is positively
// homogeneous of degree 1, so everything reduces to functions of the
// density rho = M/V. All potentials below are closed forms obtained by
// differentiating E once and evaluating at (M,V) = (rho, 1):
//
//   f(rho)   = E(rho, 1) = -a rho^2 + R T rho (log(rho/(1 - b rho)) - 1)
//   p(rho)   = -dE/dV    = R T rho / (1 - b rho) - a rho^2
//   mu(rho)  =  dE/dM    = R T log(rho/(1 - b rho)) + R T b rho/(1 - b rho) - 2 a rho
//   p'(rho)  = R T / (1 - b rho)^2 - 2 a rho
//   mu'(rho) = p'(rho) / rho
//
// The Gibbs identities f = rho mu - p and f' = mu follow from homogeneity
// and are exercised by the test suite rather than assumed.

namespace vdwflow {

/// Width of the guard band excluded next to the density singularities at
/// rho = 0 and rho = 1/b.
inline constexpr double kDensityGuard = 1e-12;

struct ThermoParams {
  double temperature = 1.0;
  double attraction = 3.0;          // a
  double covolume = 1.0 / 3.0;      // b
  double gas_constant = 8.0 / 3.0;  // R

  /// Largest representable density, 1/b.
  double rho_max() const { return 1.0 / covolume; }

  /// T_C = 8a / (27 b R); equals 1 for the dimensionless defaults.
  double critical_temperature() const {
    return 8.0 * attraction / (27.0 * covolume * gas_constant);
  }

  /// Dimensionless fluid (a = 3, b = 1/3, R = 8/3) at temperature t.
  static ThermoParams dimensionless(double t) {
    ThermoParams params;
    params.temperature = t;
    return params;
  }

  void validate() const {
    if (!(temperature > 0.0) || !(attraction > 0.0) || !(covolume > 0.0) ||
        !(gas_constant > 0.0)) {
      throw DomainError("ThermoParams requires T, a, b, R all positive");
    }
  }
};

namespace detail {

inline std::string describe_density(double rho, const ThermoParams& params) {
  std::ostringstream os;
  os << "density " << rho << " outside (" << kDensityGuard << ", "
     << params.rho_max() - kDensityGuard << ")";
  return os.str();
}

}  // namespace detail

/// Throws DomainError unless rho lies strictly inside the guard band
/// (kDensityGuard, 1/b - kDensityGuard).
inline void check_density(double rho, const ThermoParams& params) {
  if (!(rho > kDensityGuard) || !(rho < params.rho_max() - kDensityGuard)) {
    throw DomainError(detail::describe_density(rho, params));
  }
}

/// E(M,V); domain requires M > 0, V > 0 and M/V inside the covolume range.
inline double extensive_free_energy(double mass, double volume,
                                    const ThermoParams& params) {
  if (!(mass > 0.0) || !(volume > 0.0)) {
    throw DomainError("extensive_free_energy requires M > 0 and V > 0");
  }
  const double free_volume = volume - mass * params.covolume;
  if (!(free_volume > 0.0)) {
    throw DomainError("extensive_free_energy: covolume violated (V - M b <= 0)");
  }
  check_density(mass / volume, params);
  const double rt = params.gas_constant * params.temperature;
  return -params.attraction * mass * mass / volume +
         rt * (mass * std::log(mass / free_volume) - mass);
}

/// f(rho) = E(rho, 1).
inline double specific_free_energy(double rho, const ThermoParams& params) {
  check_density(rho, params);
  const double rt = params.gas_constant * params.temperature;
  const double one_minus_brho = 1.0 - params.covolume * rho;
  return -params.attraction * rho * rho +
         rt * rho * (std::log(rho / one_minus_brho) - 1.0);
}

inline double pressure(double rho, const ThermoParams& params) {
  check_density(rho, params);
  const double rt = params.gas_constant * params.temperature;
  const double one_minus_brho = 1.0 - params.covolume * rho;
  return rt * rho / one_minus_brho - params.attraction * rho * rho;
}

inline double chemical_potential(double rho, const ThermoParams& params) {
  check_density(rho, params);
  const double rt = params.gas_constant * params.temperature;
  const double one_minus_brho = 1.0 - params.covolume * rho;
  return rt * std::log(rho / one_minus_brho) +
         rt * params.covolume * rho / one_minus_brho -
         2.0 * params.attraction * rho;
}

inline double pressure_derivative(double rho, const ThermoParams& params) {
  check_density(rho, params);
  const double rt = params.gas_constant * params.temperature;
  const double one_minus_brho = 1.0 - params.covolume * rho;
  return rt / (one_minus_brho * one_minus_brho) - 2.0 * params.attraction * rho;
}

/// mu'(rho); equal to p'(rho)/rho by homogeneity.
inline double chemical_potential_derivative(double rho,
                                            const ThermoParams& params) {
  return pressure_derivative(rho, params) / rho;
}

/// p''(rho), used to bracket the isotherm extrema.
inline double pressure_second_derivative(double rho, const ThermoParams& params) {
  check_density(rho, params);
  const double rt = params.gas_constant * params.temperature;
  const double one_minus_brho = 1.0 - params.covolume * rho;
  return 2.0 * params.covolume * rt /
             (one_minus_brho * one_minus_brho * one_minus_brho) -
         2.0 * params.attraction;
}

}  // namespace vdwflow

#endif
