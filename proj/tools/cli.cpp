#include "artifacts.hpp"
#include "commands.hpp"
#include "worker_pool.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace kxy::cli {

namespace {

void add_chain_flags(CLI::App& cmd, ChainOverrides& o) {
  cmd.add_option("--config", o.file, "JSON config with keys L, J, Omega, K, T, j0_offset")
      ->check(CLI::ExistingFile);
  cmd.add_option("--L", o.sites, "Number of sites");
  cmd.add_option("--J", o.coupling, "XY coupling");
  cmd.add_option("--Omega", o.field, "Transverse field");
  cmd.add_option("--K", o.kick, "Kick strength");
  cmd.add_option("--T", o.period, "Kick period");
  cmd.add_option("--offset", o.center_offset, "Kick center offset j_offset");
}

Propagation parse_path(const std::string& text) {
  if (text == "auto") return Propagation::automatic;
  if (text == "dense") return Propagation::dense;
  if (text == "krylov") return Propagation::krylov;
  throw ConfigError("unknown --path '" + text + "' (auto, dense, krylov)");
}

std::string joined(int argc, const char* const* argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kicked XY spin chain simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  ChainOverrides spectrum_chain;
  SpectrumOptions spectrum;
  std::string k_grid, j_grid;
  int spectrum_jobs = default_jobs();
  auto* sp = app.add_subcommand("spectrum", "Floquet spectral diagnostics over a (K, J) grid");
  add_chain_flags(*sp, spectrum_chain);
  sp->add_option("--K-grid", k_grid, "K values: start:stop:count or a,b,c");
  sp->add_option("--J-grid", j_grid, "J values: start:stop:count or a,b,c");
  sp->add_option("--realizations", spectrum.realizations, "Center offset realizations");
  sp->add_option("--offset-range", spectrum.offset_range, "Offsets drawn from [-r, r]");
  sp->add_option("--seed", spectrum.seed, "Seed for the offset draws");
  sp->add_option("--state", spectrum.state, "Initial state for O_F");
  sp->add_option("--level", spectrum.level, "I_F level of the boundary guide");
  sp->add_option("--jobs", spectrum_jobs, "Worker threads")->check(CLI::PositiveNumber);
  sp->add_option("--out", spectrum.out, "Output directory")->required();

  ChainOverrides dynamics_chain;
  DynamicsCommandOptions dynamics;
  std::string dynamics_path = "auto";
  auto* dy = app.add_subcommand("dynamics", "Stroboscopic evolution from an initial state");
  add_chain_flags(*dy, dynamics_chain);
  dy->add_option("--state", dynamics.state,
                 "neel, vacuum, domain_wall, global_bell, bell_pair:i,j or a U/D pattern");
  dy->add_option("--kicks", dynamics.kicks, "Number of kicks")->check(CLI::NonNegativeNumber);
  dy->add_option("--stride", dynamics.stride, "Record every n-th kick")->check(CLI::PositiveNumber);
  dy->add_option("--A", dynamics.block_sites, "Block 1..A for S_A and F_A");
  dy->add_option("--path", dynamics_path, "auto, dense or krylov");
  dy->add_option("--out", dynamics.out, "Output directory")->required();

  DDPlanOptions ddplan;
  std::optional<std::filesystem::path> ddplan_out;
  auto* dd = app.add_subcommand("dd-plan", "Kick strengths that decouple chosen spins");
  dd->add_option("--L", ddplan.sites, "Number of sites");
  dd->add_option("--T", ddplan.period, "Kick period");
  dd->add_option("--Omega", ddplan.field, "Transverse field");
  auto* count = dd->add_option("--count", ddplan.count, "Number of decoupled spins N_d");
  auto* site = dd->add_option("--site", ddplan.site, "Decouple this site");
  dd->add_option("--m", ddplan.multiple, "Phase multiple m for --site")->needs(site);
  count->excludes(site);
  dd->add_option("--out", ddplan_out, "Also write dd_plan.csv and a manifest here");

  ScalingOptions scaling;
  std::vector<std::string> scaling_inputs;
  std::string observable = "O_F";
  auto* sc = app.add_subcommand("scaling", "Finite-size collapse of spectrum CSVs");
  sc->add_option("inputs", scaling_inputs, "spectrum.csv files")->required()->check(CLI::ExistingFile);
  sc->add_option("--observable", observable, "O_F or S_F/L");
  sc->add_option("--J", scaling.coupling, "Coupling to analyse when inputs hold several");
  sc->add_option("--bootstrap", scaling.bootstrap, "Bootstrap resamples");
  sc->add_option("--seed", scaling.seed, "Bootstrap seed");
  sc->add_option("--out", scaling.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const std::string command = joined(argc, argv);
  try {
    if (sp->parsed()) {
      spectrum.base = spectrum_chain.resolve();
      if (!k_grid.empty()) spectrum.kicks = parse_grid(k_grid);
      if (!j_grid.empty()) spectrum.couplings = parse_grid(j_grid);
      spectrum.jobs = spectrum_jobs;
      spectrum.command = command;
      run_spectrum(spectrum);
      out << "wrote " << (spectrum.out / "spectrum.csv").string() << '\n';
    } else if (dy->parsed()) {
      dynamics.config = dynamics_chain.resolve();
      dynamics.path = parse_path(dynamics_path);
      dynamics.command = command;
      run_dynamics_command(dynamics);
      out << "wrote " << (dynamics.out / "series.csv").string() << '\n';
    } else if (dd->parsed()) {
      ddplan.out = ddplan_out;
      ddplan.command = command;
      run_ddplan(ddplan, out);
    } else if (sc->parsed()) {
      scaling.observable = parse_observable(observable);
      for (const auto& s : scaling_inputs) scaling.inputs.emplace_back(s);
      scaling.command = command;
      run_scaling(scaling);
      out << "wrote " << (scaling.out / "collapse.json").string() << '\n';
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace kxy::cli
