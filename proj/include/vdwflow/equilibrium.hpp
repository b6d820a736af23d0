#ifndef VDWFLOW_EQUILIBRIUM_HPP
#define VDWFLOW_EQUILIBRIUM_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <utility>

#include "vdwflow/errors.hpp"
#include "vdwflow/roots.hpp"
#include "vdwflow/thermo.hpp"

namespace vdwflow {

/// Roots of p'(rho) = 0: the isotherm extrema delimiting the spinodal zone.
struct SpinodalBounds {
  double rho_minus = 0.0;
  double rho_plus = 0.0;
};

/// Saturation state from the equal-pressure / equal-chemical-potential
/// construction: p(rho1_star) = p(rho2_star) = p_star and
/// mu(rho1_star) = mu(rho2_star) = mu_star.
struct SaturationData {
  double rho1_star = 0.0;
  double rho2_star = 0.0;
  double p_star = 0.0;
  double mu_star = 0.0;
};

/// Bulk density together with the two phase densities at one point.
/// Canonical form keeps rho1 <= rho <= rho2.
struct MixtureState {
  double rho = 0.0;
  double rho1 = 0.0;
  double rho2 = 0.0;
};

enum class Region { PureGas, MetastableGas, Spinodal, MetastableLiquid, PureLiquid };

inline const char* to_string(Region region) {
  switch (region) {
    case Region::PureGas: return "PureGas";
    case Region::MetastableGas: return "MetastableGas";
    case Region::Spinodal: return "Spinodal";
    case Region::MetastableLiquid: return "MetastableLiquid";
    case Region::PureLiquid: return "PureLiquid";
  }
  return "?";
}

namespace detail {

/// Density at which p' attains its interior minimum (unique root of p'').
inline double pressure_inflection(const ThermoParams& params) {
  const double brt = params.covolume * params.gas_constant * params.temperature;
  return (1.0 - std::cbrt(brt / params.attraction)) / params.covolume;
}

// 8-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 8> kGaussNodes = {
    -0.96028985649753623168, -0.79666647741362673959,
    -0.52553240991632898582, -0.18343464249564980494,
    0.18343464249564980494,  0.52553240991632898582,
    0.79666647741362673959,  0.96028985649753623168};
inline constexpr std::array<double, 8> kGaussWeights = {
    0.10122853629037625915, 0.22238103445337447054,
    0.31370664587788728734, 0.36268378337836198297,
    0.36268378337836198297, 0.31370664587788728734,
    0.22238103445337447054, 0.10122853629037625915};

/// Composite 8-panel Gauss-Legendre quadrature of g over [0, 1] (64 nodes).
template <class G>
double integrate_unit_interval(G&& g) {
  constexpr int panels = 8;
  const double width = 1.0 / panels;
  double total = 0.0;
  for (int panel = 0; panel < panels; ++panel) {
    const double mid = (panel + 0.5) * width;
    double acc = 0.0;
    for (std::size_t k = 0; k < kGaussNodes.size(); ++k) {
      acc += kGaussWeights[k] * g(mid + 0.5 * width * kGaussNodes[k]);
    }
    total += 0.5 * width * acc;
  }
  return total;
}

}  // namespace detail

/// Locates the two roots of p' in (0, 1/b) by safeguarded Newton iteration
/// on the brackets split at the p' minimum. Throws NoSpinodal for a
/// monotone isotherm (T >= T_C).
inline SpinodalBounds spinodal_bounds(const ThermoParams& params) {
  params.validate();
  const double rho_infl = detail::pressure_inflection(params);
  const double rho_cap = params.rho_max() - kDensityGuard;
  const double rt = params.gas_constant * params.temperature;
  if (!(rho_infl > kDensityGuard) || !(rho_infl < rho_cap) ||
      pressure_derivative(rho_infl, params) >= -1e-12 * std::max(1.0, rt)) {
    std::ostringstream os;
    os << "isotherm at T = " << params.temperature
       << " is monotone (T_C = " << params.critical_temperature() << ")";
    throw NoSpinodal(os.str());
  }
  const auto dp = [&](double r) { return pressure_derivative(r, params); };
  const auto ddp = [&](double r) { return pressure_second_derivative(r, params); };
  SpinodalBounds bounds;
  bounds.rho_minus = newton_bisect(dp, ddp, kDensityGuard, rho_infl, 1e-12);
  bounds.rho_plus = newton_bisect(dp, ddp, rho_infl, rho_cap, 1e-12);
  return bounds;
}

namespace detail {

/// Inverts p on a monotone branch [lo, hi] of the isotherm.
inline double invert_pressure_on_branch(double target, double lo, double hi,
                                        const ThermoParams& params) {
  const auto g = [&](double r) { return pressure(r, params) - target; };
  const auto dg = [&](double r) { return pressure_derivative(r, params); };
  return newton_bisect(g, dg, lo, hi, 1e-13);
}

/// Nested bisection over the saturation pressure: for each trial p the gas
/// and liquid branches are inverted and the chemical-potential gap
/// mu(gas) - mu(liquid) is driven to zero. The gap is strictly increasing
/// in p, so plain bisection is globally convergent.
inline std::pair<double, double> maxwell_bisection(const SpinodalBounds& spin,
                                                   const ThermoParams& params) {
  const double gas_lo = kDensityGuard * 2.0;
  const double liq_hi = params.rho_max() - kDensityGuard * 2.0;
  double p_lo = std::max(pressure(spin.rho_plus, params), 0.0) +
                1e-14 * std::max(1.0, std::abs(pressure(spin.rho_minus, params)));
  double p_hi = pressure(spin.rho_minus, params) * (1.0 - 1e-14);
  if (!(p_lo < p_hi)) {
    throw ConvergenceFailure("maxwell_construction: empty saturation pressure bracket");
  }
  const auto mu_gap = [&](double p_try) {
    const double r_gas =
        invert_pressure_on_branch(p_try, gas_lo, spin.rho_minus, params);
    const double r_liq =
        invert_pressure_on_branch(p_try, spin.rho_plus, liq_hi, params);
    return chemical_potential(r_gas, params) - chemical_potential(r_liq, params);
  };
  double g_lo = mu_gap(p_lo);
  double g_hi = mu_gap(p_hi);
  if (!(g_lo < 0.0) || !(g_hi > 0.0)) {
    throw ConvergenceFailure("maxwell_construction: chemical-potential gap does not bracket zero");
  }
  for (int it = 0; it < 200 && p_hi - p_lo > 1e-15 * p_hi; ++it) {
    const double p_mid = 0.5 * (p_lo + p_hi);
    if (mu_gap(p_mid) < 0.0) {
      p_lo = p_mid;
    } else {
      p_hi = p_mid;
    }
  }
  const double p_sat = 0.5 * (p_lo + p_hi);
  return {invert_pressure_on_branch(p_sat, gas_lo, spin.rho_minus, params),
          invert_pressure_on_branch(p_sat, spin.rho_plus, liq_hi, params)};
}

}  // namespace detail

/// Solves mu(rho1) = mu(rho2), p(rho1) = p(rho2) for the saturation pair
/// rho1_star < rho_minus < rho_plus < rho2_star.
///
/// Primary path: 2x2 Newton with the analytic Jacobian. If an iterate
/// leaves the brackets (0, rho_minus) x (rho_plus, 1/b), which also rules
/// out collapse onto the trivial rho1 = rho2 family, the nested bisection
/// over the saturation pressure takes over. The returned state is verified
/// against the integral (equal-area) form of the construction.
inline SaturationData maxwell_construction(const ThermoParams& params) {
  const SpinodalBounds spin = spinodal_bounds(params);

  double r1 = 0.5 * spin.rho_minus;
  double r2 = 0.5 * (spin.rho_plus + params.rho_max());
  bool newton_ok = false;
  for (int it = 0; it < 60; ++it) {
    const double mu1 = chemical_potential(r1, params);
    const double mu2 = chemical_potential(r2, params);
    const double p1 = pressure(r1, params);
    const double p2 = pressure(r2, params);
    const double g1 = mu1 - mu2;
    const double g2 = p1 - p2;
    const double scale = std::max({1.0, std::abs(mu1), std::abs(p1)});
    if (std::abs(g1) < 1e-13 * scale && std::abs(g2) < 1e-13 * scale) {
      newton_ok = true;
      break;
    }
    const double dmu1 = chemical_potential_derivative(r1, params);
    const double dmu2 = chemical_potential_derivative(r2, params);
    const double dp1 = pressure_derivative(r1, params);
    const double dp2 = pressure_derivative(r2, params);
    const double det = -dmu1 * dp2 + dmu2 * dp1;
    if (det == 0.0) break;
    r1 -= (-g1 * dp2 + g2 * dmu2) / det;
    r2 -= (-g2 * dmu1 + g1 * dp1) / det;
    if (!(r1 > kDensityGuard) || !(r1 < spin.rho_minus) ||
        !(r2 > spin.rho_plus) || !(r2 < params.rho_max() - kDensityGuard)) {
      break;  // left the physical brackets: use the bisection fallback
    }
  }
  if (!newton_ok) {
    std::tie(r1, r2) = detail::maxwell_bisection(spin, params);
  }

  SaturationData sat;
  sat.rho1_star = r1;
  sat.rho2_star = r2;
  sat.p_star = pressure(r1, params);
  sat.mu_star = chemical_potential(r1, params);

  const double scale = std::max({1.0, std::abs(sat.mu_star), std::abs(sat.p_star)});
  if (std::abs(chemical_potential(r2, params) - sat.mu_star) > 1e-10 * scale ||
      std::abs(pressure(r2, params) - sat.p_star) > 1e-10 * scale) {
    throw ConvergenceFailure("maxwell_construction: residuals above tolerance");
  }
  const double area = detail::integrate_unit_interval([&](double t) {
    return chemical_potential(r2 + t * (r1 - r2), params);
  });
  if (std::abs(area - sat.mu_star) > 1e-6 * scale) {
    std::ostringstream os;
    os << "maxwell_construction: equal-area residual " << area - sat.mu_star;
    throw ConvergenceFailure(os.str());
  }
  return sat;
}

/// Quadrature residual of the equal-area rule for a saturation state:
/// integral of mu along the segment [rho2_star, rho1_star] minus mu_star.
inline double maxwell_area_residual(const SaturationData& sat,
                                    const ThermoParams& params) {
  const double area = detail::integrate_unit_interval([&](double t) {
    return chemical_potential(sat.rho2_star + t * (sat.rho1_star - sat.rho2_star),
                              params);
  });
  return area - sat.mu_star;
}

/// Stability region of a density. Boundaries: the spinodal interval is
/// closed, the saturation densities belong to the metastable side.
inline Region classify(double rho, const SaturationData& sat,
                       const SpinodalBounds& spin) {
  if (rho < sat.rho1_star) return Region::PureGas;
  if (rho < spin.rho_minus) return Region::MetastableGas;
  if (rho <= spin.rho_plus) return Region::Spinodal;
  if (rho <= sat.rho2_star) return Region::MetastableLiquid;
  return Region::PureLiquid;
}

/// (alpha1, alpha2) with alpha1 = (rho - rho2) / (rho1 - rho2).
/// Undefined when the phase densities coincide.
inline std::pair<double, double> volume_fractions(const MixtureState& state) {
  if (state.rho1 == state.rho2) {
    throw DegenerateMixture("volume_fractions: rho1 == rho2");
  }
  const double alpha1 = (state.rho - state.rho2) / (state.rho1 - state.rho2);
  return {alpha1, 1.0 - alpha1};
}

/// F = alpha1 f(rho1) + alpha2 f(rho2); collapses to f(rho) for a
/// degenerate (single-density) state.
inline double mixture_free_energy(const MixtureState& state,
                                  const ThermoParams& params) {
  if (state.rho1 == state.rho2) {
    return specific_free_energy(state.rho, params);
  }
  const auto [alpha1, alpha2] = volume_fractions(state);
  return alpha1 * specific_free_energy(state.rho1, params) +
         alpha2 * specific_free_energy(state.rho2, params);
}

}  // namespace vdwflow

#endif
