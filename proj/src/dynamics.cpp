#include "kickedxy/dynamics.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace kxy {

namespace {

// F(rho0, rho) with sqrt(rho0) computed once per trajectory.
class FidelityReference {
 public:
  explicit FidelityReference(const ReducedDensityMatrix& rho0)
      : root_(psd_sqrt(rho0.matrix)) {}

  double operator()(const ReducedDensityMatrix& rho) const {
    Eigen::MatrixXcd inner = root_ * rho.matrix * root_;
    inner = 0.5 * (inner + inner.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        inner, Eigen::EigenvaluesOnly);
    double trace = 0.0;
    for (double lambda : solver.eigenvalues()) {
      if (lambda > 0.0) trace += std::sqrt(lambda);
    }
    return std::clamp(trace * trace, 0.0, 1.0);
  }

 private:
  Eigen::MatrixXcd root_;
};

void check_window(const TimeSeries& series, KickWindow window) {
  if (window.first > window.last) {
    throw ConfigError("window [" + std::to_string(window.first) + ", " +
                      std::to_string(window.last) + "] is empty");
  }
  if (series.kicks.empty() || window.first < series.kicks.front() ||
      window.last > series.kicks.back()) {
    throw ConfigError("window [" + std::to_string(window.first) + ", " +
                      std::to_string(window.last) +
                      "] lies outside the simulated range");
  }
}

double window_mean(const TimeSeries& series, const Eigen::VectorXd& values,
                   KickWindow window) {
  check_window(series, window);
  double sum = 0.0;
  int count = 0;
  for (Index s = 0; s < series.size(); ++s) {
    const int n = series.kicks[static_cast<std::size_t>(s)];
    if (n < window.first || n > window.last) continue;
    sum += values(s);
    ++count;
  }
  if (count == 0) throw ConfigError("no snapshot falls inside the window");
  return sum / count;
}

}  // namespace

TimeSeries run_dynamics(const FloquetOperator& floquet, const StateVector& psi0,
                        const EvolutionSchedule& schedule, int block_sites) {
  schedule.validate();
  const ChainConfig& config = floquet.config();
  const int sites = config.sites;
  if (psi0.sites != sites || psi0.dimension() != floquet.dimension()) {
    throw ConfigError("initial state does not match L = " +
                      std::to_string(sites));
  }
  if (block_sites < 0 || block_sites >= sites) {
    throw ConfigError("subsystem size must satisfy 0 <= A < L");
  }

  TimeSeries ts;
  ts.config = config;
  ts.block_sites = block_sites;
  ts.record_stride = schedule.record_stride;
  const int count = schedule.snapshot_count();
  ts.kicks.reserve(static_cast<std::size_t>(count));
  ts.times.resize(count);
  ts.up_probability.resize(count, sites);
  ts.imbalance.resize(count);
  ts.edge_sz.resize(count);
  if (block_sites > 0) {
    ts.entropy.resize(count);
    ts.fidelity.resize(count);
  }

  Eigen::VectorXd stagger(sites);
  for (int j = 1; j <= sites; ++j) stagger(j - 1) = (j % 2 == 1) ? 1.0 : -1.0;

  std::optional<FidelityReference> reference;
  if (block_sites > 0) reference.emplace(reduce_to_block(psi0, block_sites));

  int row = 0;
  evolve_each(floquet, psi0, schedule, [&](int n, const StateVector& psi) {
    const Eigen::VectorXd sz = sigma_z_profile(psi);
    const Eigen::VectorXd up = (0.5 * (sz.array() + 1.0)).cwiseMax(0.0).cwiseMin(1.0);
    ts.kicks.push_back(n);
    ts.times(row) = n * config.period;
    ts.up_probability.row(row) = up.transpose();
    ts.imbalance(row) = stagger.dot(up) / sites;
    ts.edge_sz(row) = sz(0);
    if (block_sites > 0) {
      const ReducedDensityMatrix rho = reduce_to_block(psi, block_sites);
      ts.entropy(row) = entanglement_entropy(rho);
      ts.fidelity(row) = (*reference)(rho);
    }
    ++row;
  });
  return ts;
}

TimeSeries run_dynamics(const ChainConfig& config, const StateVector& psi0,
                        const EvolutionSchedule& schedule, int block_sites,
                        const DynamicsOptions& options) {
  FloquetOptions fo;
  fo.path = options.path;
  fo.krylov = options.krylov;
  fo.propagator = options.propagator;
  return run_dynamics(build_floquet(config, fo), psi0, schedule, block_sites);
}

double time_averaged_imbalance(const TimeSeries& series, KickWindow window) {
  return window_mean(series, series.imbalance, window);
}

double saturation_entropy(const TimeSeries& series, KickWindow window) {
  const int half = series.config.sites / 2;
  if (series.block_sites != half) {
    throw ConfigError("saturation entropy needs A = " + std::to_string(half) +
                      ", series carries A = " +
                      std::to_string(series.block_sites));
  }
  return window_mean(series, series.entropy, window);
}

SpectrumEstimate sampled_spectrum(const Eigen::VectorXd& samples,
                                  double sample_spacing) {
  if (samples.size() < kMinSpectrumSamples) {
    throw ConfigError("spectrum needs at least " +
                      std::to_string(kMinSpectrumSamples) + " samples, got " +
                      std::to_string(samples.size()));
  }
  const Index n = samples.size();
  const Index padded = kSpectrumPadding * n;
  std::vector<double> input(static_cast<std::size_t>(padded), 0.0);
  const double mean = samples.mean();
  for (Index i = 0; i < n; ++i) input[static_cast<std::size_t>(i)] = samples(i) - mean;

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<Complex> output;
  fft.fwd(output, input);

  const Index bins = padded / 2 + 1;
  SpectrumEstimate est;
  est.resolution = 1.0 / (static_cast<double>(padded) * sample_spacing);
  est.frequencies.resize(bins);
  est.magnitudes.resize(bins);
  for (Index k = 0; k < bins; ++k) {
    est.frequencies(k) = k * est.resolution;
    est.magnitudes(k) = std::abs(output[static_cast<std::size_t>(k)]);
  }

  Index peak = 1;
  for (Index k = 2; k < bins; ++k) {
    if (est.magnitudes(k) > est.magnitudes(peak)) peak = k;
  }
  double shift = 0.0;
  if (peak + 1 < bins) {
    const double a = est.magnitudes(peak - 1);
    const double b = est.magnitudes(peak);
    const double c = est.magnitudes(peak + 1);
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) shift = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  }
  est.peak_frequency = (static_cast<double>(peak) + shift) * est.resolution;
  return est;
}

SpectrumEstimate edge_spin_spectrum(const TimeSeries& series, int site) {
  if (site < 1 || site > series.config.sites) {
    throw ConfigError("site out of range");
  }
  return sampled_spectrum(series.up_probability.col(site - 1),
                          series.record_stride);
}

LifetimeEstimate envelope_lifetime(const std::vector<int>& kicks,
                                   const Eigen::VectorXd& signal, int window,
                                   double prominence) {
  const Index n = signal.size();
  if (static_cast<Index>(kicks.size()) != n) {
    throw ConfigError("lifetime: kick and signal lengths differ");
  }
  if (n < 3) throw ConfigError("lifetime: series too short");
  if (window < 1) throw ConfigError("lifetime: window must be positive");
  if (!(prominence > 0.0)) throw ConfigError("lifetime: prominence must be positive");
  const int stride = std::max(1, kicks.size() > 1 ? kicks[1] - kicks[0] : 1);
  const Index half = std::max<Index>(1, std::lround(double(window) / stride) / 2);

  LifetimeEstimate est;
  // Envelope nodes: samples that are the first maximum of their window.
  for (Index i = 0; i < n; ++i) {
    const Index lo = std::max<Index>(0, i - half);
    const Index hi = std::min<Index>(n - 1, i + half);
    bool top = true;
    for (Index k = lo; k <= hi && top; ++k) {
      if (k < i ? signal(k) >= signal(i) : signal(k) > signal(i)) top = false;
    }
    if (top) {
      est.envelope_kicks.push_back(kicks[static_cast<std::size_t>(i)]);
      est.envelope_values.push_back(signal(i));
    }
  }

  // Zig-zag scan over the nodes: descend from the running maximum, then
  // confirm the lowest point once the envelope climbs back.
  const std::vector<double>& v = est.envelope_values;
  double peak = v.empty() ? 0.0 : v.front();
  double trough = 0.0;
  int trough_at = -1;
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (trough_at < 0) {
      if (v[k] > peak) {
        peak = v[k];
      } else if (v[k] < peak - prominence) {
        trough = v[k];
        trough_at = static_cast<int>(k);
      }
    } else if (v[k] < trough) {
      trough = v[k];
      trough_at = static_cast<int>(k);
    } else if (v[k] > trough + prominence) {
      est.minimum_index = trough_at;
      est.tau = est.envelope_kicks[static_cast<std::size_t>(trough_at)];
      return est;
    }
  }
  est.open_ended = true;
  est.tau = kicks.back();
  return est;
}

LifetimeEstimate lifetime(const TimeSeries& series,
                          const LifetimeOptions& options) {
  if (series.size() == 0) throw ConfigError("lifetime: empty series");
  int window = options.window;
  if (window <= 0) {
    const double omega_t = series.config.field * series.config.period;
    if (!(omega_t > 0.0)) {
      throw ConfigError("lifetime: Rabi window undefined for Omega T = 0");
    }
    window = static_cast<int>(std::lround(std::numbers::pi / omega_t));
  }
  return envelope_lifetime(series.kicks, series.edge_sz, window,
                           options.prominence);
}

}  // namespace kxy
