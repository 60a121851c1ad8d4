#pragma once

#include "kickedxy/core.hpp"
#include "kickedxy/floquet.hpp"
#include "kickedxy/scaling.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace kxy::cli {

/// Exit codes of the tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// Flag overrides applied on top of a config file (or the defaults).
struct ChainOverrides {
  std::optional<std::filesystem::path> file;
  std::optional<int> sites;
  std::optional<double> coupling;
  std::optional<double> field;
  std::optional<double> kick;
  std::optional<double> period;
  std::optional<double> center_offset;

  ChainConfig resolve() const;
};

/// "start:stop:count" (inclusive, evenly spaced) or "a,b,c".
std::vector<double> parse_grid(const std::string& text);

struct SpectrumOptions {
  ChainConfig base;
  std::vector<double> kicks;      // empty: base.kick
  std::vector<double> couplings;  // empty: base.coupling
  int realizations = 1;
  double offset_range = 0.02;
  std::uint64_t seed = 2024;
  std::string state = "neel";
  double level = kBoundaryLevel;
  int jobs = 1;
  std::filesystem::path out;
  std::string command;
};

struct DynamicsCommandOptions {
  ChainConfig config;
  std::string state = "neel";
  int kicks = 200;
  int stride = 1;
  std::optional<int> block_sites;  // default floor(L / 2)
  Propagation path = Propagation::automatic;
  std::filesystem::path out;
  std::string command;
};

struct DDPlanOptions {
  int sites = 21;
  double period = 1.0 / 16.0;
  double field = 1.0;
  std::optional<int> count;
  std::optional<int> site;
  int multiple = 1;
  std::optional<std::filesystem::path> out;
  std::string command;
};

struct ScalingOptions {
  std::vector<std::filesystem::path> inputs;
  ScalingObservable observable = ScalingObservable::staggered;
  std::optional<double> coupling;
  int bootstrap = 100;
  std::uint64_t seed = 2024;
  std::filesystem::path out;
  std::string command;
};

void run_spectrum(const SpectrumOptions& options);
void run_dynamics_command(const DynamicsCommandOptions& options);
void run_ddplan(const DDPlanOptions& options, std::ostream& out);
void run_scaling(const ScalingOptions& options);

/// Reads spectrum CSVs into a scaling dataset for one coupling.
ScalingDataset read_scaling_dataset(const std::vector<std::filesystem::path>& inputs,
                                    ScalingObservable observable,
                                    std::optional<double> coupling);

/// Parses argv and dispatches; maps errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kxy::cli
