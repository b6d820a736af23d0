#ifndef VDWFLOW_SCENARIO_HPP
#define VDWFLOW_SCENARIO_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vdwflow/equilibrium.hpp"
#include "vdwflow/errors.hpp"
#include "vdwflow/hydro.hpp"
#include "vdwflow/relaxation.hpp"
#include "vdwflow/thermo.hpp"

namespace vdwflow {

/// Full description of a Riemann-problem run, read from a flat
/// key = value configuration file.
struct ScenarioConfig {
  struct SideState {
    double rho = 0.0;
    double rho1 = 0.0;
    double rho2 = 0.0;
    double u = 0.0;
  };

  double temperature = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  double interface_x = 0.0;
  std::size_t n_cells = 0;
  double cfl = 0.0;
  double epsilon = 0.0;
  double t_end = 0.0;
  BoundaryRule boundary = BoundaryRule::Transmissive;
  SideState left;
  SideState right;
  std::vector<double> snapshot_times;
  std::string output_prefix = "out";

  void validate() const {
    if (!(temperature > 0.0)) throw ValidationError("temperature must be positive");
    if (!(x_min < interface_x) || !(interface_x < x_max)) {
      throw ValidationError("requires x_min < interface_x < x_max");
    }
    if (n_cells < 3) throw ValidationError("n_cells must be at least 3");
    if (!(cfl > 0.0) || !(cfl < 1.0)) throw ValidationError("cfl must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    if (!(t_end > 0.0)) throw ValidationError("t_end must be positive");
    for (const SideState* side : {&left, &right}) {
      if (!(side->rho1 <= side->rho) || !(side->rho <= side->rho2)) {
        throw ValidationError("state must satisfy rho1 <= rho <= rho2 after canonicalization");
      }
    }
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r");
  auto end = s.find_last_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  return s.substr(begin, end - begin + 1);
}

struct RawConfig {
  std::map<std::string, std::pair<std::string, int>> entries;  // key -> (value, line)
};

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "temperature", "x_min", "x_max", "interface_x", "n_cells", "cfl",
      "epsilon", "t_end", "boundary", "rho_L", "rho1_L", "rho2_L", "u_L",
      "rho_R", "rho1_R", "rho2_R", "u_R", "snapshot_times", "output_prefix"};
  return keys;
}

inline RawConfig parse_raw(std::istream& in) {
  RawConfig raw;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "line " << line_no << ": expected key = value, got '" << stripped << "'";
      throw ParseError(os.str());
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) {
      std::ostringstream os;
      os << "line " << line_no << ": empty key or value";
      throw ParseError(os.str());
    }
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      std::ostringstream os;
      os << "line " << line_no << ": unknown key '" << key << "'";
      throw ParseError(os.str());
    }
    if (raw.entries.count(key) != 0) {
      std::ostringstream os;
      os << "line " << line_no << ": duplicate key '" << key << "'";
      throw ParseError(os.str());
    }
    raw.entries[key] = {value, line_no};
  }
  return raw;
}

inline double parse_double(const std::string& value, const std::string& key,
                           int line_no) {
  std::size_t used = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size()) {
    std::ostringstream os;
    os << "line " << line_no << ": key '" << key << "': cannot parse number '"
       << value << "'";
    throw ParseError(os.str());
  }
  return parsed;
}

/// Density values may reference the solver's own high-precision isotherm
/// extrema instead of a literal number.
inline double resolve_density(const std::string& value, const std::string& key,
                              int line_no, const ThermoParams& params) {
  if (value == "@spinodal_minus") return spinodal_bounds(params).rho_minus;
  if (value == "@spinodal_plus") return spinodal_bounds(params).rho_plus;
  if (!value.empty() && value[0] == '@') {
    std::ostringstream os;
    os << "line " << line_no << ": key '" << key << "': unknown reference '"
       << value << "'";
    throw ParseError(os.str());
  }
  return parse_double(value, key, line_no);
}

}  // namespace detail

/// Parses and validates a flat key = value configuration document.
/// Lines may carry '#' comments; every key must be known and appear at most
/// once. Missing mandatory keys raise ValidationError, malformed text
/// raises ParseError.
inline ScenarioConfig load_config(std::istream& in) {
  detail::RawConfig raw = detail::parse_raw(in);

  const auto require = [&](const std::string& key) -> std::pair<std::string, int> {
    auto it = raw.entries.find(key);
    if (it == raw.entries.end()) {
      throw ValidationError("missing mandatory key '" + key + "'");
    }
    return it->second;
  };
  const auto get_double = [&](const std::string& key) {
    const auto [value, line] = require(key);
    return detail::parse_double(value, key, line);
  };

  ScenarioConfig config;
  config.temperature = get_double("temperature");
  if (!(config.temperature > 0.0)) {
    throw ValidationError("temperature must be positive");
  }
  const ThermoParams params = ThermoParams::dimensionless(config.temperature);

  const auto get_density = [&](const std::string& key) {
    const auto [value, line] = require(key);
    return detail::resolve_density(value, key, line, params);
  };

  config.x_min = get_double("x_min");
  config.x_max = get_double("x_max");
  config.interface_x = get_double("interface_x");
  const auto [cells_value, cells_line] = require("n_cells");
  const double cells = detail::parse_double(cells_value, "n_cells", cells_line);
  if (!(cells >= 0.0) || cells != std::floor(cells)) {
    throw ValidationError("n_cells must be a non-negative integer");
  }
  config.n_cells = static_cast<std::size_t>(cells);
  config.cfl = get_double("cfl");
  config.epsilon = get_double("epsilon");
  config.t_end = get_double("t_end");

  if (auto it = raw.entries.find("boundary"); it != raw.entries.end()) {
    const auto& [value, line] = it->second;
    if (value == "transmissive") {
      config.boundary = BoundaryRule::Transmissive;
    } else if (value == "periodic") {
      config.boundary = BoundaryRule::Periodic;
    } else {
      std::ostringstream os;
      os << "line " << line << ": boundary must be 'transmissive' or 'periodic'";
      throw ParseError(os.str());
    }
  }

  config.left.rho = get_density("rho_L");
  config.left.rho1 = get_density("rho1_L");
  config.left.rho2 = get_density("rho2_L");
  config.left.u = get_double("u_L");
  config.right.rho = get_density("rho_R");
  config.right.rho1 = get_density("rho1_R");
  config.right.rho2 = get_density("rho2_R");
  config.right.u = get_double("u_R");

  // canonical phase ordering
  for (ScenarioConfig::SideState* side : {&config.left, &config.right}) {
    if (side->rho1 > side->rho2) std::swap(side->rho1, side->rho2);
  }

  if (auto it = raw.entries.find("snapshot_times"); it != raw.entries.end()) {
    const auto& [value, line] = it->second;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string token = detail::trim(item);
      if (token.empty()) continue;
      config.snapshot_times.push_back(
          detail::parse_double(token, "snapshot_times", line));
    }
    std::sort(config.snapshot_times.begin(), config.snapshot_times.end());
  }
  if (auto it = raw.entries.find("output_prefix"); it != raw.entries.end()) {
    config.output_prefix = it->second.first;
  }

  config.validate();
  return config;
}

inline ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return load_config(in);
}

/// Piecewise-constant Riemann initial data: cells whose centers lie left of
/// interface_x receive the left state, the rest the right state.
inline GridState init_riemann(const ScenarioConfig& config,
                              const ThermoParams& params) {
  GridState grid;
  grid.dx = (config.x_max - config.x_min) / static_cast<double>(config.n_cells);
  grid.x_min = config.x_min;
  grid.cells.resize(config.n_cells);
  const double lo = kDensityGuard;
  const double hi = params.rho_max() - kDensityGuard;
  for (const ScenarioConfig::SideState* side : {&config.left, &config.right}) {
    for (double value : {side->rho, side->rho1, side->rho2}) {
      if (!(value > lo) || !(value < hi)) {
        std::ostringstream os;
        os << "init_riemann: density " << value << " outside (0, "
           << params.rho_max() << ")";
        throw InvalidState(os.str());
      }
    }
  }
  for (std::size_t i = 0; i < config.n_cells; ++i) {
    const ScenarioConfig::SideState& side =
        grid.cell_center(i) < config.interface_x ? config.left : config.right;
    grid.cells[i] = {side.rho, side.rho1, side.rho2, side.rho * side.u};
  }
  return grid;
}

/// One output row per cell; the twelve columns of the snapshot format.
struct SnapshotRecord {
  double x = 0.0;
  double rho = 0.0;
  double rho1 = 0.0;
  double rho2 = 0.0;
  double u = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double p_mix = 0.0;
};

inline std::vector<SnapshotRecord> make_snapshot(const GridState& grid,
                                                 const ThermoParams& params) {
  std::vector<SnapshotRecord> records;
  records.reserve(grid.cells.size());
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const ConservedCell& cell = grid.cells[i];
    const auto [alpha1, alpha2] = cell_fractions(cell);
    SnapshotRecord rec;
    rec.x = grid.cell_center(i);
    rec.rho = cell.rho;
    rec.rho1 = cell.rho1;
    rec.rho2 = cell.rho2;
    rec.u = cell.velocity();
    rec.p1 = pressure(cell.rho1, params);
    rec.p2 = pressure(cell.rho2, params);
    rec.mu1 = chemical_potential(cell.rho1, params);
    rec.mu2 = chemical_potential(cell.rho2, params);
    rec.alpha1 = alpha1;
    rec.alpha2 = alpha2;
    rec.p_mix = alpha1 * rec.p1 + alpha2 * rec.p2;
    records.push_back(rec);
  }
  return records;
}

inline constexpr const char* kSnapshotHeader =
    "x,rho,rho1,rho2,u,p1,p2,mu1,mu2,alpha1,alpha2,p_mix";

/// Writes one CSV snapshot: fixed header, one row per cell, 12 significant
/// digits, LF line endings.
inline void write_snapshot(const std::vector<SnapshotRecord>& records,
                           const std::string& path) {
  if (records.empty()) throw InvalidState("write_snapshot: no records");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << kSnapshotHeader << "\n";
  char buffer[64];
  for (const SnapshotRecord& rec : records) {
    const double columns[12] = {rec.x,  rec.rho, rec.rho1,   rec.rho2,
                                rec.u,  rec.p1,  rec.p2,     rec.mu1,
                                rec.mu2, rec.alpha1, rec.alpha2, rec.p_mix};
    for (int k = 0; k < 12; ++k) {
      std::snprintf(buffer, sizeof buffer, "%.12g", columns[k]);
      out << buffer << (k == 11 ? "\n" : ",");
    }
  }
  if (!out) throw IoError("write failure on '" + path + "'");
}

namespace detail {

inline std::string snapshot_filename(const std::string& prefix, double time) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6f", time);
  return prefix + "_t" + buffer + ".csv";
}

inline void write_plot_script(const std::string& prefix,
                              const std::vector<std::string>& csv_files) {
  std::ofstream out(prefix + "_plot", std::ios::binary);
  if (!out) throw IoError("cannot open '" + prefix + "_plot' for writing");
  out << "#!/usr/bin/env python3\n"
         "\"\"\"Plots the snapshot CSVs of one run: twelve panels with the\n"
         "densities, chemical potentials, pressures, fractions and velocity.\"\"\"\n"
         "import csv\n"
         "import matplotlib.pyplot as plt\n"
         "\n"
         "FILES = [\n";
  for (const std::string& file : csv_files) {
    out << "    \"" << file << "\",\n";
  }
  out << "]\n"
         "\n"
         "PANELS = [\n"
         "    (\"rho\", None), (\"rho1\", None), (\"rho2\", None),\n"
         "    (\"mu\", \"mix\"), (\"mu1\", None), (\"mu2\", None),\n"
         "    (\"p_mix\", None), (\"p1\", None), (\"p2\", None),\n"
         "    (\"alpha1\", None), (\"alpha2\", None), (\"u\", None),\n"
         "]\n"
         "\n"
         "fig, axes = plt.subplots(4, 3, figsize=(13, 11), sharex=True)\n"
         "for path in FILES:\n"
         "    with open(path, newline=\"\") as handle:\n"
         "        rows = list(csv.DictReader(handle))\n"
         "    data = {k: [float(r[k]) for r in rows] for k in rows[0]}\n"
         "    data[\"mu\"] = [a1 * m1 + a2 * m2 for a1, m1, a2, m2 in\n"
         "                  zip(data[\"alpha1\"], data[\"mu1\"],\n"
         "                      data[\"alpha2\"], data[\"mu2\"])]\n"
         "    for ax, (column, _) in zip(axes.flat, PANELS):\n"
         "        ax.plot(data[\"x\"], data[column], label=path)\n"
         "for ax, (column, _) in zip(axes.flat, PANELS):\n"
         "    ax.set_title(column)\n"
         "    ax.grid(True, alpha=0.3)\n"
         "axes.flat[0].legend(fontsize=7)\n"
         "fig.tight_layout()\n"
         "fig.savefig(\"" << prefix << "_panels.png\", dpi=150)\n"
         "print(\"wrote " << prefix << "_panels.png\")\n";
}

}  // namespace detail

/// Aggregate diagnostics of one run.
struct RunSummary {
  double t_final = 0.0;
  std::size_t steps = 0;
  double mass_initial = 0.0;
  double mass_final = 0.0;
  double min_density = 0.0;
  double max_density = 0.0;
  std::vector<double> energy_history;
  std::size_t nonhyperbolic_events = 0;
  double edge_max_deviation = 0.0;
  bool edge_cells_unchanged = false;
  std::vector<std::string> snapshot_files;
  GridState final_grid;

  double mass_drift() const {
    return std::abs(mass_final - mass_initial) / std::abs(mass_initial);
  }
};

namespace detail {

inline double grid_mass(const GridState& grid) {
  double sum = 0.0;
  for (const ConservedCell& cell : grid.cells) sum += cell.rho;
  return sum * grid.dx;
}

inline double edge_deviation(const ConservedCell& now, const ConservedCell& init) {
  return std::max({std::abs(now.rho - init.rho), std::abs(now.rho1 - init.rho1),
                   std::abs(now.rho2 - init.rho2),
                   std::abs(now.momentum - init.momentum)});
}

}  // namespace detail

/// Time-marches the split scheme to t_end (the last step is clipped to land
/// exactly on it), writing snapshot CSVs at the first completed step past
/// each requested time, at t_end, and a companion plot script.
inline RunSummary run(const ScenarioConfig& config,
                      const HydroOptions& options_in = {}) {
  config.validate();
  const ThermoParams params = ThermoParams::dimensionless(config.temperature);
  RelaxationSettings settings;
  settings.epsilon = config.epsilon;

  GridState grid = init_riemann(config, params);
  const ConservedCell first_cell = grid.cells.front();
  const ConservedCell last_cell = grid.cells.back();

  RunSummary summary;
  HydroOptions options = options_in;
  options.nonhyperbolic_counter = &summary.nonhyperbolic_events;

  summary.mass_initial = detail::grid_mass(grid);
  summary.min_density = summary.max_density = grid.cells.front().rho;
  summary.energy_history.push_back(total_energy(grid, params));

  std::vector<double> pending = config.snapshot_times;
  double t = 0.0;
  const auto emit = [&](double time) {
    const std::string path =
        detail::snapshot_filename(config.output_prefix, time);
    write_snapshot(make_snapshot(grid, params), path);
    summary.snapshot_files.push_back(path);
  };

  while (t < config.t_end) {
    double dt = cfl_dt(grid, config.cfl, params, options);
    bool final_step = false;
    if (t + dt >= config.t_end) {
      dt = config.t_end - t;
      final_step = true;
    }
    try {
      grid = convective_step(grid, dt, params, config.boundary, options);
      for (ConservedCell& cell : grid.cells) {
        const MixtureState relaxed =
            relax_step(cell.mixture(), dt, settings, params);
        cell.rho1 = relaxed.rho1;
        cell.rho2 = relaxed.rho2;
      }
    } catch (const Error& err) {
      std::ostringstream os;
      os << err.what() << " (at t = " << t << ", step " << summary.steps << ")";
      throw Error(err.category(), os.str());
    }
    t = final_step ? config.t_end : t + dt;
    ++summary.steps;
    for (const ConservedCell& cell : grid.cells) {
      summary.min_density = std::min(summary.min_density, cell.rho);
      summary.max_density = std::max(summary.max_density, cell.rho);
    }
    summary.energy_history.push_back(total_energy(grid, params));
    bool snapshot_due = false;
    while (!pending.empty() && t >= pending.front()) {
      snapshot_due = true;
      pending.erase(pending.begin());
    }
    if (snapshot_due && !final_step) emit(t);
  }
  emit(config.t_end);
  detail::write_plot_script(config.output_prefix, summary.snapshot_files);

  summary.t_final = t;
  summary.mass_final = detail::grid_mass(grid);
  summary.edge_max_deviation =
      std::max(detail::edge_deviation(grid.cells.front(), first_cell),
               detail::edge_deviation(grid.cells.back(), last_cell));
  summary.edge_cells_unchanged = summary.edge_max_deviation <= 1e-13;
  summary.final_grid = std::move(grid);
  return summary;
}

}  // namespace vdwflow

#endif
