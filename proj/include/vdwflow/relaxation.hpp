#ifndef VDWFLOW_RELAXATION_HPP
#define VDWFLOW_RELAXATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <vector>

#include "vdwflow/equilibrium.hpp"
#include "vdwflow/errors.hpp"
#include "vdwflow/thermo.hpp"

namespace vdwflow {

/// Instantaneous mass-transfer rates (drho1/dt, drho2/dt) of the relaxation
/// system, before division by the relaxation time. The bulk density is an
/// invariant of the system and has no rate.
struct SourceRate {
  double drho1_dt = 0.0;
  double drho2_dt = 0.0;
};

struct RelaxationSettings {
  /// Relaxation time scaling the source, drho_i/dt = rate_i / epsilon.
  double epsilon = 1e-3;
  /// Cap on the per-substep density change relative to the distance from
  /// the admissible-region boundaries.
  double max_substep_rate = 0.1;
  /// Guard band for clamping phase densities after a substep.
  double projection_delta = 1e-12;
  /// Hard cap on the substep count of a single relax_step call.
  std::size_t substep_ceiling = 1'000'000;
};

inline SourceRate source_rhs(const MixtureState& state,
                             const ThermoParams& params) {
  check_density(state.rho, params);
  const double mu1 = chemical_potential(state.rho1, params);
  const double mu2 = chemical_potential(state.rho2, params);
  const double p1 = pressure(state.rho1, params);
  const double p2 = pressure(state.rho2, params);
  const double prefactor = (state.rho - state.rho1) * (state.rho - state.rho2);
  SourceRate rate;
  rate.drho1_dt = -prefactor * (state.rho2 * (mu2 - mu1) + p1 - p2);
  rate.drho2_dt = prefactor * (state.rho1 * (mu1 - mu2) - p1 + p2);
  return rate;
}

/// Max-norm of the rates, before division by epsilon. Convergence
/// tolerances expressed in this norm are independent of the relaxation time.
inline double source_rate_norm(const SourceRate& rate) {
  return std::max(std::abs(rate.drho1_dt), std::abs(rate.drho2_dt));
}

/// Infinity norm of the analytic Jacobian of the rates with respect to
/// (rho1, rho2). Bounds the local growth rate of the relaxation system and
/// with it the largest explicit-Euler substep that keeps the integration
/// contractive near equilibria.
inline double source_stiffness(const MixtureState& state,
                               const ThermoParams& params) {
  const double mu1 = chemical_potential(state.rho1, params);
  const double mu2 = chemical_potential(state.rho2, params);
  const double p1 = pressure(state.rho1, params);
  const double p2 = pressure(state.rho2, params);
  const double dp1 = pressure_derivative(state.rho1, params);
  const double dp2 = pressure_derivative(state.rho2, params);
  const double dmu1 = dp1 / state.rho1;
  const double dmu2 = dp2 / state.rho2;
  const double pre = (state.rho - state.rho1) * (state.rho - state.rho2);
  const double b1 = state.rho2 * (mu2 - mu1) + p1 - p2;
  const double b2 = state.rho1 * (mu1 - mu2) - p1 + p2;
  const double j11 = (state.rho - state.rho2) * b1 - pre * (dp1 - state.rho2 * dmu1);
  const double j12 = (state.rho - state.rho1) * b1 -
                     pre * ((mu2 - mu1) + state.rho2 * dmu2 - dp2);
  const double j21 = -(state.rho - state.rho2) * b2 +
                     pre * ((mu1 - mu2) + state.rho1 * dmu1 - dp1);
  const double j22 = -(state.rho - state.rho1) * b2 + pre * (dp2 - state.rho1 * dmu2);
  return std::max(std::abs(j11) + std::abs(j12), std::abs(j21) + std::abs(j22));
}

/// Largest admissible explicit-Euler substep at this state: the density
/// change is capped at max_substep_rate times the smallest margin
/// min(rho1, 1/b - rho2, rho2 - rho1), and the step stays inside the
/// stability interval of the local linearization. Returns +inf at exact
/// equilibria.
inline double max_stable_substep(const MixtureState& state,
                                 const RelaxationSettings& settings,
                                 const ThermoParams& params) {
  double h = std::numeric_limits<double>::infinity();
  const double norm = source_rate_norm(source_rhs(state, params));
  if (norm > 0.0) {
    const double margin = std::min({state.rho1, params.rho_max() - state.rho2,
                                    state.rho2 - state.rho1});
    h = settings.max_substep_rate * margin * settings.epsilon / norm;
  }
  const double stiffness = source_stiffness(state, params);
  if (stiffness > 0.0) {
    h = std::min(h, settings.epsilon / stiffness);
  }
  return h;
}

/// Restores the representation invariants after an Euler update: phase
/// densities clamped to the guard band, ordered rho1 <= rho2, and the
/// bracket widened to contain rho if the update pushed it outside.
inline MixtureState canonicalize(MixtureState state, double delta,
                                 const ThermoParams& params) {
  const double lo = delta;
  const double hi = params.rho_max() - delta;
  state.rho1 = std::clamp(state.rho1, lo, hi);
  state.rho2 = std::clamp(state.rho2, lo, hi);
  if (state.rho1 > state.rho2) std::swap(state.rho1, state.rho2);
  if (state.rho < state.rho1) state.rho1 = state.rho;
  if (state.rho > state.rho2) state.rho2 = state.rho;
  return state;
}

/// One explicit-Euler substep of size h on (rho1, rho2); rho is untouched.
inline MixtureState euler_substep(const MixtureState& state, double h,
                                  const RelaxationSettings& settings,
                                  const ThermoParams& params) {
  const SourceRate rate = source_rhs(state, params);
  MixtureState next = state;
  next.rho1 = state.rho1 + (h / settings.epsilon) * rate.drho1_dt;
  next.rho2 = state.rho2 + (h / settings.epsilon) * rate.drho2_dt;
  return canonicalize(next, settings.projection_delta, params);
}

namespace detail {

// Attempts dt as n equal substeps; each substep must respect the bound
// evaluated at its own state. Appends accepted states to *trace if given.
inline bool try_equal_substeps(const MixtureState& start, double dt,
                               std::size_t n, const RelaxationSettings& settings,
                               const ThermoParams& params, MixtureState& result,
                               std::vector<MixtureState>* trace) {
  const double h = dt / static_cast<double>(n);
  MixtureState state = start;
  std::vector<MixtureState> local;
  for (std::size_t k = 0; k < n; ++k) {
    if (h > max_stable_substep(state, settings, params) * (1.0 + 1e-12)) {
      return false;
    }
    state = euler_substep(state, h, settings, params);
    if (trace) local.push_back(state);
  }
  if (trace) trace->insert(trace->end(), local.begin(), local.end());
  result = state;
  return true;
}

inline MixtureState relax_step_impl(const MixtureState& state, double dt,
                                    const RelaxationSettings& settings,
                                    const ThermoParams& params,
                                    std::vector<MixtureState>* trace) {
  if (!(dt > 0.0)) {
    throw InvalidState("relax_step requires dt > 0");
  }
  MixtureState start = canonicalize(state, settings.projection_delta, params);
  if (trace) trace->push_back(start);

  std::size_t n = 1;
  const double h_max = max_stable_substep(start, settings, params);
  if (std::isfinite(h_max) && dt > h_max) {
    n = static_cast<std::size_t>(std::ceil(dt / h_max));
  }
  for (; n <= settings.substep_ceiling; n *= 2) {
    MixtureState result;
    if (try_equal_substeps(start, dt, n, settings, params, result, trace)) {
      return result;
    }
  }
  std::ostringstream os;
  os << "relax_step: substep count exceeds ceiling " << settings.substep_ceiling
     << " for dt = " << dt << ", epsilon = " << settings.epsilon;
  throw StiffnessOverflow(os.str());
}

}  // namespace detail

/// Advances the relaxation system over dt by explicit Euler on
/// (1/epsilon) * source_rhs, sub-cycled into n equal substeps so that every
/// substep respects max_stable_substep at the state where it is taken
/// (n doubles and the step restarts when a mid-trajectory violation shows
/// up). The bulk density is bit-identical on output.
inline MixtureState relax_step(const MixtureState& state, double dt,
                               const RelaxationSettings& settings,
                               const ThermoParams& params) {
  return detail::relax_step_impl(state, dt, settings, params, nullptr);
}

/// relax_step variant recording every accepted substep state (the input
/// state first). Intended for dissipation diagnostics and tests.
inline MixtureState relax_step_traced(const MixtureState& state, double dt,
                                      const RelaxationSettings& settings,
                                      const ThermoParams& params,
                                      std::vector<MixtureState>& trace) {
  return detail::relax_step_impl(state, dt, settings, params, &trace);
}

enum class EquilibriumKind { Pure1, Pure2, Mixture };

inline const char* to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::Pure1: return "Pure1";
    case EquilibriumKind::Pure2: return "Pure2";
    case EquilibriumKind::Mixture: return "Mixture";
  }
  return "?";
}

struct EquilibriumResult {
  MixtureState state;
  EquilibriumKind kind = EquilibriumKind::Mixture;
  std::size_t substeps = 0;
  /// Max-norm of the rates at the returned state.
  double residual = 0.0;
  /// For Mixture limits below the critical temperature: largest deviation
  /// of (rho1, rho2) from the saturation pair. NaN when not applicable.
  double maxwell_deviation = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// A limit is pure when one fraction saturates or the phase densities have
// collapsed onto each other.
inline constexpr double kPureFractionTol = 1e-6;
inline constexpr double kDegenerateGapTol = 1e-5;

inline EquilibriumKind classify_limit(const MixtureState& state) {
  if (state.rho2 - state.rho1 < kDegenerateGapTol) {
    return std::abs(state.rho - state.rho1) <= std::abs(state.rho - state.rho2)
               ? EquilibriumKind::Pure1
               : EquilibriumKind::Pure2;
  }
  const double alpha1 = (state.rho - state.rho2) / (state.rho1 - state.rho2);
  if (alpha1 >= 1.0 - kPureFractionTol) return EquilibriumKind::Pure1;
  if (alpha1 <= kPureFractionTol) return EquilibriumKind::Pure2;
  return EquilibriumKind::Mixture;
}

}  // namespace detail

/// Integrates the relaxation system with adaptively sized substeps until
/// the rate norm drops below tol, then classifies the limit. Mixture limits
/// are cross-checked against maxwell_construction when a saturation state
/// exists at this temperature.
inline EquilibriumResult find_equilibrium(const MixtureState& state,
                                          const RelaxationSettings& settings,
                                          const ThermoParams& params, double tol,
                                          std::size_t budget) {
  EquilibriumResult result;
  result.state = canonicalize(state, settings.projection_delta, params);
  while (true) {
    result.residual = source_rate_norm(source_rhs(result.state, params));
    if (result.residual < tol) break;
    if (result.substeps >= budget) {
      std::ostringstream os;
      os << "find_equilibrium: residual " << result.residual
         << " above tolerance " << tol << " after " << budget << " substeps";
      throw NotConverged(os.str());
    }
    const double h = max_stable_substep(result.state, settings, params);
    result.state = euler_substep(result.state, h, settings, params);
    ++result.substeps;
  }
  result.kind = detail::classify_limit(result.state);
  if (result.kind == EquilibriumKind::Mixture &&
      params.temperature < params.critical_temperature()) {
    const SaturationData sat = maxwell_construction(params);
    result.maxwell_deviation =
        std::max(std::abs(result.state.rho1 - sat.rho1_star),
                 std::abs(result.state.rho2 - sat.rho2_star));
  }
  return result;
}

}  // namespace vdwflow

#endif
