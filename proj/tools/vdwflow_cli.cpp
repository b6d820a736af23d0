// Command-line front end: Maxwell construction lookup, homogeneous
// relaxation time series, and full Riemann-problem runs.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vdwflow/equilibrium.hpp"
#include "vdwflow/errors.hpp"
#include "vdwflow/relaxation.hpp"
#include "vdwflow/scenario.hpp"
#include "vdwflow/thermo.hpp"

namespace {

void print_key_value(const char* key, double value) {
  std::printf("%s=%.9g\n", key, value);
}

int cmd_maxwell(double temperature) {
  const auto params = vdwflow::ThermoParams::dimensionless(temperature);
  const auto sat = vdwflow::maxwell_construction(params);
  const auto spin = vdwflow::spinodal_bounds(params);
  print_key_value("rho1_star", sat.rho1_star);
  print_key_value("rho2_star", sat.rho2_star);
  print_key_value("p_star", sat.p_star);
  print_key_value("mu_star", sat.mu_star);
  print_key_value("rho_minus", spin.rho_minus);
  print_key_value("rho_plus", spin.rho_plus);
  return 0;
}

int cmd_relax(double temperature, double rho, double rho1, double rho2,
              double epsilon, double t_end) {
  const auto params = vdwflow::ThermoParams::dimensionless(temperature);
  vdwflow::RelaxationSettings settings;
  settings.epsilon = epsilon;
  vdwflow::MixtureState state{rho, rho1, rho2};
  state = vdwflow::canonicalize(state, settings.projection_delta, params);

  constexpr int n_rows = 200;
  const double dt = t_end / n_rows;
  std::printf("t,rho1,rho2,alpha1,F,p1,p2,mu1,mu2\n");
  const auto emit_row = [&](double t) {
    const double alpha1 =
        state.rho1 == state.rho2
            ? 1.0
            : (state.rho - state.rho2) / (state.rho1 - state.rho2);
    std::printf("%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", t,
                state.rho1, state.rho2, alpha1,
                vdwflow::mixture_free_energy(state, params),
                vdwflow::pressure(state.rho1, params),
                vdwflow::pressure(state.rho2, params),
                vdwflow::chemical_potential(state.rho1, params),
                vdwflow::chemical_potential(state.rho2, params));
  };
  emit_row(0.0);
  for (int i = 1; i <= n_rows; ++i) {
    state = vdwflow::relax_step(state, dt, settings, params);
    emit_row(i * dt);
  }
  return 0;
}

int cmd_run(const std::string& config_path, std::optional<double> epsilon,
            std::optional<std::size_t> cells, std::optional<double> t_end) {
  vdwflow::ScenarioConfig config = vdwflow::load_config_file(config_path);
  if (epsilon) config.epsilon = *epsilon;
  if (cells) config.n_cells = *cells;
  if (t_end) config.t_end = *t_end;
  config.validate();

  const vdwflow::RunSummary summary = vdwflow::run(config);
  std::printf("steps=%zu\n", summary.steps);
  std::printf("t_final=%.12g\n", summary.t_final);
  std::printf("mass_drift=%.3e\n", summary.mass_drift());
  std::printf("density_range=[%.6g, %.6g]\n", summary.min_density,
              summary.max_density);
  std::printf("nonhyperbolic_events=%zu\n", summary.nonhyperbolic_events);
  std::printf("edge_cells_unchanged=%s (max deviation %.3e)\n",
              summary.edge_cells_unchanged ? "yes" : "no",
              summary.edge_max_deviation);
  for (const std::string& file : summary.snapshot_files) {
    std::printf("snapshot=%s\n", file.c_str());
  }
  std::printf("plot_script=%s_plot\n", config.output_prefix.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1D isothermal two-phase van der Waals flow solver"};
  app.require_subcommand(1);

  double temperature = 0.85;
  auto* maxwell = app.add_subcommand(
      "maxwell", "Print the saturation state and isotherm extrema");
  maxwell->add_option("--temperature", temperature, "Isotherm temperature")
      ->required();

  double rho = 0.0, rho1 = 0.0, rho2 = 0.0, epsilon = 1e-3, t_end = 1.0;
  auto* relax = app.add_subcommand(
      "relax", "Integrate the homogeneous relaxation system, CSV on stdout");
  relax->add_option("--temperature", temperature)->required();
  relax->add_option("--rho", rho, "Bulk density")->required();
  relax->add_option("--rho1", rho1, "Phase 1 density")->required();
  relax->add_option("--rho2", rho2, "Phase 2 density")->required();
  relax->add_option("--epsilon", epsilon, "Relaxation time")->required();
  relax->add_option("--t-end", t_end, "End time")->required();

  std::string config_path;
  std::optional<double> epsilon_override;
  std::optional<std::size_t> cells_override;
  std::optional<double> t_end_override;
  auto* run_cmd =
      app.add_subcommand("run", "Run a Riemann scenario from a config file");
  run_cmd->add_option("config", config_path, "Path to the config file")
      ->required();
  run_cmd->add_option("--epsilon", epsilon_override,
                      "Override the config relaxation time");
  run_cmd->add_option("--cells", cells_override, "Override the cell count");
  run_cmd->add_option("--t-end", t_end_override, "Override the end time");

  CLI11_PARSE(app, argc, argv);

  try {
    if (maxwell->parsed()) return cmd_maxwell(temperature);
    if (relax->parsed()) {
      return cmd_relax(temperature, rho, rho1, rho2, epsilon, t_end);
    }
    if (run_cmd->parsed()) {
      return cmd_run(config_path, epsilon_override, cells_override,
                     t_end_override);
    }
  } catch (const vdwflow::Error& err) {
    std::fprintf(stderr, "error category=%s detail=\"%s\"\n",
                 err.category().c_str(), err.what());
    return 1;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error category=Internal detail=\"%s\"\n", err.what());
    return 2;
  }
  return 0;
}
