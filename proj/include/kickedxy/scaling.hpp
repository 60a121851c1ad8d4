#pragma once

#include "kickedxy/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kxy {

enum class ScalingObservable { staggered, entropy_density };  // O_F, S_F / L

std::string to_string(ScalingObservable observable);
ScalingObservable parse_observable(const std::string& text);

struct ScalingPoint {
  double coupling = 0.0;  // J
  double kick = 0.0;      // K
  int sites = 0;          // L
  std::vector<double> samples;  // one value per realization

  double mean() const;
};

struct ScalingDataset {
  ScalingObservable observable = ScalingObservable::staggered;
  std::vector<ScalingPoint> points;

  std::vector<int> sizes() const;
  std::vector<double> kicks() const;      // distinct, ascending
  std::vector<double> couplings() const;  // distinct, ascending
  /// Points at one J (exact match).
  ScalingDataset at_coupling(double coupling) const;
  /// Throws ConfigError unless there are >= 3 sizes and every size has a
  /// strictly increasing K grid.
  void validate() const;
};

struct CollapseResult {
  double critical_kick = 0.0;  // K_c
  double nu = 0.0;
  double cost = 0.0;
  double unscaled_cost = 0.0;  // same objective with x = K
  double critical_kick_error = 0.0;  // bootstrap standard deviation
  double nu_error = 0.0;
  int bootstrap_samples = 0;
  bool resampled_realizations = false;  // otherwise points were resampled
  bool non_critical = false;
  std::vector<double> bootstrap_kicks;
  std::vector<double> bootstrap_nus;
};

struct CollapseOptions {
  std::vector<double> critical_kicks;  // empty: data K grid refined 4x
  std::vector<double> nus;             // empty: 0.30 .. 1.20 step 0.01
  int bootstrap = 100;
  std::uint64_t seed = 2024;
  double bandwidth_factor = 3.0;       // x median abscissa spacing
  /// Flagged non-critical when the best cost does not undercut this
  /// fraction of the unscaled cost.
  double critical_gain = 0.5;
};

/// Mean squared residual of the pooled local-linear master curve at
/// x = (K - K_c) L^(1/nu). Every point is predicted from the other sizes only.
double collapse_cost(const ScalingDataset& data, double critical_kick, double nu,
                     double bandwidth_factor = 3.0);

CollapseResult collapse(const ScalingDataset& data,
                        const CollapseOptions& options = {});

struct CollapsedPoint {
  int sites = 0;
  double kick = 0.0;
  double scaled = 0.0;  // (K - K_c) L^(1/nu)
  double value = 0.0;
};

std::vector<CollapsedPoint> collapsed_curve(const ScalingDataset& data,
                                            double critical_kick, double nu);

/// I_F sampled on a rectangular grid: values(r, c) at J = couplings[r],
/// K = kicks[c].
struct ParameterGrid {
  std::vector<double> kicks;
  std::vector<double> couplings;
  Eigen::MatrixXd values;
};

struct BoundaryPoint {
  double kick = 0.0;
  double coupling = 0.0;
};

inline constexpr double kBoundaryLevel = 0.009;

/// First crossing of `level` along K in every J row, linearly interpolated
/// inside the cell; rows that never cross are skipped. Empty when the level
/// lies outside the data range.
std::vector<BoundaryPoint> boundary_trace(const ParameterGrid& grid,
                                          double level = kBoundaryLevel);

}  // namespace kxy
