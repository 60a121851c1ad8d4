#pragma once

#include "kickedxy/floquet.hpp"

#include <vector>

namespace kxy {

/// Stroboscopic observables of one trajectory, one row per snapshot.
struct TimeSeries {
  ChainConfig config;
  int block_sites = 0;  // A; 0 when S_A and F_A were not requested
  int record_stride = 1;
  std::vector<int> kicks;        // n for every snapshot
  Eigen::VectorXd times;         // n T
  Eigen::MatrixXd up_probability;  // snapshots x L, P_up(j, t)
  Eigen::VectorXd imbalance;     // (1/L) sum_j (-1)^(j+1) P_up(j, t)
  Eigen::VectorXd entropy;       // S_A(t), empty when A = 0
  Eigen::VectorXd fidelity;      // F_A(t) against rho_A(0), empty when A = 0
  Eigen::VectorXd edge_sz;       // <sigma^z_1(t)>

  Index size() const { return times.size(); }
  bool has_block() const { return block_sites > 0; }
};

struct DynamicsOptions {
  /// Trajectories are cheapest matrix-free; the dense path only pays off
  /// when one U_F is reused over many runs.
  Propagation path = Propagation::krylov;
  KrylovOptions krylov;
  std::shared_ptr<const StaticPropagator> propagator;
};

/// Evolves psi0 under U_F and records the observables every
/// schedule.record_stride kicks. block_sites = 0 skips S_A and F_A.
TimeSeries run_dynamics(const ChainConfig& config, const StateVector& psi0,
                        const EvolutionSchedule& schedule, int block_sites = 0,
                        const DynamicsOptions& options = {});
TimeSeries run_dynamics(const FloquetOperator& floquet, const StateVector& psi0,
                        const EvolutionSchedule& schedule, int block_sites = 0);

/// Inclusive range of kick numbers [first, last].
struct KickWindow {
  int first = 0;
  int last = 0;
};

inline constexpr KickWindow kImbalanceWindow{100, 200};
inline constexpr KickWindow kSaturationWindow{400, 600};

/// Mean of the imbalance over the snapshots inside the window.
double time_averaged_imbalance(const TimeSeries& series,
                               KickWindow window = kImbalanceWindow);

/// Mean of S_A over the window; the series must carry A = floor(L/2).
double saturation_entropy(const TimeSeries& series,
                          KickWindow window = kSaturationWindow);

struct SpectrumEstimate {
  Eigen::VectorXd frequencies;  // cycles per kick period, 0..1/2
  Eigen::VectorXd magnitudes;
  double peak_frequency = 0.0;  // parabolic interpolation around the argmax
  double resolution = 0.0;      // spacing of the padded frequency grid
};

inline constexpr int kMinSpectrumSamples = 256;
inline constexpr int kSpectrumPadding = 4;

/// DFT magnitude of P_up(site, .) with the mean removed, rectangular window,
/// zero padded to 4x the series length.
SpectrumEstimate edge_spin_spectrum(const TimeSeries& series, int site = 1);
SpectrumEstimate sampled_spectrum(const Eigen::VectorXd& samples,
                                  double sample_spacing = 1.0);

struct LifetimeEstimate {
  double tau = 0.0;             // in units of T
  bool open_ended = false;      // no envelope minimum inside the horizon
  std::vector<int> envelope_kicks;
  std::vector<double> envelope_values;
  int minimum_index = -1;       // into envelope_*; -1 when open ended
};

struct LifetimeOptions {
  /// Sliding-window length in kicks; <= 0 selects round(pi / (Omega T)).
  int window = 0;
  /// A minimum counts once the envelope has fallen this far below the
  /// preceding maximum and risen this far above the minimum again. Peak to
  /// peak jitter of the envelope is ~1e-2 deep in the decoupled regime.
  double prominence = 0.05;
};

/// Upper envelope of <sigma^z_1> from sliding-window maxima and the time of
/// its first local minimum.
LifetimeEstimate lifetime(const TimeSeries& series,
                          const LifetimeOptions& options = {});
/// Same on a raw signal sampled at `kicks`; `window` is in kicks.
LifetimeEstimate envelope_lifetime(const std::vector<int>& kicks,
                                   const Eigen::VectorXd& signal, int window,
                                   double prominence = 0.05);

}  // namespace kxy
