#ifndef VDWFLOW_HYDRO_HPP
#define VDWFLOW_HYDRO_HPP

#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>
#include <vector>

#include "vdwflow/equilibrium.hpp"
#include "vdwflow/errors.hpp"
#include "vdwflow/relaxation.hpp"
#include "vdwflow/thermo.hpp"

namespace vdwflow {

/// Conserved vector of one finite-volume cell:
/// (rho, rho1, rho2, rho u).
struct ConservedCell {
  double rho = 0.0;
  double rho1 = 0.0;
  double rho2 = 0.0;
  double momentum = 0.0;

  double velocity() const { return momentum / rho; }
  MixtureState mixture() const { return {rho, rho1, rho2}; }
};

/// Flux components matching the ConservedCell slots.
struct FluxVector {
  double mass = 0.0;
  double mass1 = 0.0;
  double mass2 = 0.0;
  double momentum = 0.0;
};

enum class BoundaryRule { Transmissive, Periodic };

/// Uniform 1D mesh of conserved cells.
struct GridState {
  std::vector<ConservedCell> cells;
  double dx = 0.0;
  double x_min = 0.0;

  double cell_center(std::size_t i) const {
    return x_min + (static_cast<double>(i) + 0.5) * dx;
  }
};

enum class SoundSpeedPolicy {
  Fatal,  ///< negative radicand throws ComplexSoundSpeed
  Clamp,  ///< negative radicand is replaced by a small speed floor
};

inline constexpr double kSoundSpeedFloor = 1e-8;
inline constexpr double kDefaultDtMax = 1e-2;

struct HydroOptions {
  SoundSpeedPolicy sound_speed_policy = SoundSpeedPolicy::Fatal;
  /// Time step returned when every cell has zero wave speed.
  double dt_max = kDefaultDtMax;
  /// Incremented for every clamped non-hyperbolic cell (Clamp policy only).
  std::size_t* nonhyperbolic_counter = nullptr;
};

/// Volume fractions of a cell, with the degenerate rho1 == rho2 case
/// treated as pure phase 1.
inline std::pair<double, double> cell_fractions(const ConservedCell& cell) {
  if (cell.rho1 == cell.rho2) return {1.0, 0.0};
  return volume_fractions(cell.mixture());
}

/// alpha1 p(rho1) + alpha2 p(rho2).
inline double mixture_pressure(const ConservedCell& cell,
                               const ThermoParams& params) {
  const auto [alpha1, alpha2] = cell_fractions(cell);
  if (alpha2 == 0.0) return pressure(cell.rho1, params);
  return alpha1 * pressure(cell.rho1, params) +
         alpha2 * pressure(cell.rho2, params);
}

/// Radicand of the mixture sound speed,
/// (alpha1 rho1 p'(rho1) + alpha2 rho2 p'(rho2)) / rho.
inline double sound_speed_radicand(const ConservedCell& cell,
                                   const ThermoParams& params) {
  const auto [alpha1, alpha2] = cell_fractions(cell);
  return (alpha1 * cell.rho1 * pressure_derivative(cell.rho1, params) +
          alpha2 * cell.rho2 * pressure_derivative(cell.rho2, params)) /
         cell.rho;
}

inline double sound_speed(const ConservedCell& cell, const ThermoParams& params,
                          SoundSpeedPolicy policy = SoundSpeedPolicy::Fatal,
                          std::size_t* nonhyperbolic_counter = nullptr) {
  const double radicand = sound_speed_radicand(cell, params);
  if (radicand < 0.0) {
    if (policy == SoundSpeedPolicy::Fatal) {
      const auto [alpha1, alpha2] = cell_fractions(cell);
      std::ostringstream os;
      os << "sound_speed: negative radicand " << radicand << " at rho = "
         << cell.rho << ", rho1 = " << cell.rho1 << ", rho2 = " << cell.rho2
         << ", alpha1 = " << alpha1 << ", alpha2 = " << alpha2;
      throw ComplexSoundSpeed(os.str());
    }
    if (nonhyperbolic_counter) ++*nonhyperbolic_counter;
    return kSoundSpeedFloor;
  }
  return std::sqrt(radicand);
}

/// F(W) = (rho u, rho1 u, rho2 u, rho u^2 + alpha1 p1 + alpha2 p2).
inline FluxVector physical_flux(const ConservedCell& cell,
                                const ThermoParams& params) {
  const double u = cell.velocity();
  FluxVector flux;
  flux.mass = cell.momentum;
  flux.mass1 = cell.rho1 * u;
  flux.mass2 = cell.rho2 * u;
  flux.momentum = cell.momentum * u + mixture_pressure(cell, params);
  return flux;
}

/// Rusanov two-point flux with the local wave-speed bound
/// s = max(|u_L| + c_L, |u_R| + c_R).
inline FluxVector rusanov_flux(const ConservedCell& left,
                               const ConservedCell& right,
                               const ThermoParams& params,
                               SoundSpeedPolicy policy = SoundSpeedPolicy::Fatal,
                               std::size_t* nonhyperbolic_counter = nullptr) {
  const FluxVector flux_left = physical_flux(left, params);
  const FluxVector flux_right = physical_flux(right, params);
  const double s_left = std::abs(left.velocity()) +
                        sound_speed(left, params, policy, nonhyperbolic_counter);
  const double s_right =
      std::abs(right.velocity()) +
      sound_speed(right, params, policy, nonhyperbolic_counter);
  const double s = std::max(s_left, s_right);
  FluxVector flux;
  flux.mass = 0.5 * (flux_left.mass + flux_right.mass) - 0.5 * s * (right.rho - left.rho);
  flux.mass1 =
      0.5 * (flux_left.mass1 + flux_right.mass1) - 0.5 * s * (right.rho1 - left.rho1);
  flux.mass2 =
      0.5 * (flux_left.mass2 + flux_right.mass2) - 0.5 * s * (right.rho2 - left.rho2);
  flux.momentum = 0.5 * (flux_left.momentum + flux_right.momentum) -
                  0.5 * s * (right.momentum - left.momentum);
  return flux;
}

/// CFL time step cfl * dx / max(|u| + c); falls back to options.dt_max on a
/// grid whose largest wave speed vanishes.
inline double cfl_dt(const GridState& grid, double cfl, const ThermoParams& params,
                     const HydroOptions& options = {}) {
  if (!(cfl > 0.0) || !(cfl < 1.0)) {
    throw InvalidState("cfl_dt requires 0 < cfl < 1");
  }
  double max_speed = 0.0;
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const ConservedCell& cell = grid.cells[i];
    const double speed =
        std::abs(cell.velocity()) +
        sound_speed(cell, params, options.sound_speed_policy,
                    options.nonhyperbolic_counter);
    max_speed = std::max(max_speed, speed);
  }
  if (max_speed == 0.0) return options.dt_max;
  return cfl * grid.dx / max_speed;
}

namespace detail {

inline const ConservedCell& ghost_cell(const GridState& grid, bool left_side,
                                       BoundaryRule bc) {
  if (bc == BoundaryRule::Periodic) {
    return left_side ? grid.cells.back() : grid.cells.front();
  }
  return left_side ? grid.cells.front() : grid.cells.back();
}

}  // namespace detail

/// Conservative Rusanov update of the whole grid over dt. Ghost cells follow
/// the boundary rule. Throws InvalidState (with the cell index) if an
/// updated density leaves the admissible range.
inline GridState convective_step(const GridState& grid, double dt,
                                 const ThermoParams& params, BoundaryRule bc,
                                 const HydroOptions& options = {}) {
  const std::size_t n = grid.cells.size();
  if (n == 0) throw InvalidState("convective_step: empty grid");

  std::vector<FluxVector> interface_flux(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const ConservedCell& left =
        (j == 0) ? detail::ghost_cell(grid, true, bc) : grid.cells[j - 1];
    const ConservedCell& right =
        (j == n) ? detail::ghost_cell(grid, false, bc) : grid.cells[j];
    interface_flux[j] = rusanov_flux(left, right, params,
                                     options.sound_speed_policy,
                                     options.nonhyperbolic_counter);
  }

  GridState next = grid;
  const double lambda = dt / grid.dx;
  const double lo = kDensityGuard;
  const double hi = params.rho_max() - kDensityGuard;
  for (std::size_t i = 0; i < n; ++i) {
    const FluxVector& fl = interface_flux[i];
    const FluxVector& fr = interface_flux[i + 1];
    ConservedCell& cell = next.cells[i];
    cell.rho -= lambda * (fr.mass - fl.mass);
    cell.rho1 -= lambda * (fr.mass1 - fl.mass1);
    cell.rho2 -= lambda * (fr.mass2 - fl.mass2);
    cell.momentum -= lambda * (fr.momentum - fl.momentum);
    if (!(cell.rho > lo) || !(cell.rho < hi) || !(cell.rho1 > lo) ||
        !(cell.rho1 < hi) || !(cell.rho2 > lo) || !(cell.rho2 < hi)) {
      std::ostringstream os;
      os << "convective_step: cell " << i << " left the admissible range: rho = "
         << cell.rho << ", rho1 = " << cell.rho1 << ", rho2 = " << cell.rho2;
      throw InvalidState(os.str());
    }
  }
  return next;
}

/// One fractional step: CFL time step, convective update, then the
/// relaxation source applied cell by cell over the same dt. Returns the
/// updated grid and the dt that was used.
inline std::pair<GridState, double> full_step(const GridState& grid,
                                              const RelaxationSettings& settings,
                                              double cfl, const ThermoParams& params,
                                              BoundaryRule bc,
                                              const HydroOptions& options = {}) {
  const double dt = cfl_dt(grid, cfl, params, options);
  GridState next = convective_step(grid, dt, params, bc, options);
  for (ConservedCell& cell : next.cells) {
    const MixtureState relaxed = relax_step(cell.mixture(), dt, settings, params);
    cell.rho1 = relaxed.rho1;
    cell.rho2 = relaxed.rho2;
  }
  return {std::move(next), dt};
}

/// dx * sum of cell energies rho u^2/2 + alpha1 f(rho1) + alpha2 f(rho2).
inline double total_energy(const GridState& grid, const ThermoParams& params) {
  double sum = 0.0;
  for (const ConservedCell& cell : grid.cells) {
    const double u = cell.velocity();
    const auto [alpha1, alpha2] = cell_fractions(cell);
    const double free_energy =
        (alpha2 == 0.0)
            ? specific_free_energy(cell.rho1, params)
            : alpha1 * specific_free_energy(cell.rho1, params) +
                  alpha2 * specific_free_energy(cell.rho2, params);
    sum += 0.5 * cell.rho * u * u + free_energy;
  }
  return grid.dx * sum;
}

}  // namespace vdwflow

#endif
