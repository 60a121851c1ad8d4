#include "kickedxy/spectral.hpp"

#include "symmetric_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace kxy {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_phase(double theta) {
  // Map to (-pi, pi].
  theta = std::remainder(theta, 2.0 * kPi);
  if (theta <= -kPi) theta += 2.0 * kPi;
  return theta;
}

double quasienergy(double theta, double period) {
  const double eps = -theta / period;
  return eps <= -kPi / period ? kPi / period : eps;
}

// Rows of +-1: signs(b, j) = s_{j+1}(b).
Eigen::MatrixXd site_signs(int sites) {
  const Index dim = Index{1} << sites;
  Eigen::MatrixXd signs(dim, sites);
  for (Index b = 0; b < dim; ++b) {
    for (int j = 0; j < sites; ++j) signs(b, j) = ((b >> j) & 1) ? 1.0 : -1.0;
  }
  return signs;
}

}  // namespace

Eigen::VectorXcd FloquetSpectrum::eigenvector(Index alpha) const {
  if (!has_vectors()) throw ConfigError("spectrum was computed without vectors");
  return half_kick.cwiseProduct(real_vectors.col(alpha).cast<Complex>());
}

Eigen::MatrixXcd FloquetSpectrum::eigenvectors() const {
  if (!has_vectors()) throw ConfigError("spectrum was computed without vectors");
  return half_kick.asDiagonal() * real_vectors.cast<Complex>();
}

Eigen::VectorXcd FloquetSpectrum::overlaps(const StateVector& psi) const {
  if (!has_vectors()) throw ConfigError("spectrum was computed without vectors");
  if (psi.dimension() != dimension()) {
    throw ConfigError("state dimension does not match the spectrum");
  }
  const Eigen::VectorXcd rotated = half_kick.conjugate().cwiseProduct(psi.amplitudes);
  Eigen::VectorXcd c(dimension());
  c.real().noalias() = real_vectors.transpose() * rotated.real();
  c.imag().noalias() = real_vectors.transpose() * rotated.imag();
  return c;
}

FloquetSpectrum diagonalize_floquet(const FloquetOperator& floquet,
                                    bool with_vectors) {
  const StaticPropagator& prop = floquet.static_propagator();
  const Index dim = floquet.dimension();
  const Eigen::VectorXd& angles = floquet.kick().angles;

  FloquetSpectrum spectrum;
  spectrum.config = floquet.config();
  spectrum.half_kick = (angles * -0.5).unaryExpr(
      [](double a) { return std::polar(1.0, a); });

  // Golden-angle sequence of trial rotations.
  constexpr double kRotationStep = 2.399963229728653;
  constexpr int kMaxRotations = 12;
  constexpr double kMinRcond = 1e-10;

  Eigen::MatrixXd cayley;
  double rotation = 0.0;
  for (int attempt = 0; attempt < kMaxRotations; ++attempt) {
    rotation = attempt * kRotationStep;
    Eigen::MatrixXd x(dim, dim);
    Eigen::MatrixXd y(dim, dim);
    const Complex turn = std::polar(1.0, rotation);
    for (Index b = 0; b < dim; ++b) {
      // z_a = exp(i rho) h_a h_b, so M'_ab = z_a (C_ab - i S_ab).
      const Complex zb = turn * spectrum.half_kick(b);
      for (Index a = 0; a < dim; ++a) {
        const Complex z = zb * spectrum.half_kick(a);
        const double c = prop.cos_part(a, b);
        const double s = prop.sin_part(a, b);
        x(a, b) = c * z.real() + s * z.imag();
        y(a, b) = c * z.imag() - s * z.real();
      }
    }
    x.diagonal().array() += 1.0;
    Eigen::PartialPivLU<Eigen::Ref<Eigen::MatrixXd>> lu(x);
    if (lu.rcond() < kMinRcond) continue;
    cayley = lu.solve(y);
    break;
  }
  if (cayley.size() == 0) {
    throw NumericError("Floquet diagonalization: no well-conditioned rotation");
  }
  // A is symmetric up to round-off; the solver reads the lower triangle.
  for (Index b = 0; b < dim; ++b) {
    for (Index a = b + 1; a < dim; ++a) {
      cayley(a, b) = 0.5 * (cayley(a, b) + cayley(b, a));
    }
  }
  const detail::SymmetricEigen eig =
      detail::symmetric_eigen(std::move(cayley), with_vectors);

  Eigen::VectorXd raw(dim);
  for (Index i = 0; i < dim; ++i) {
    raw(i) = wrap_phase(2.0 * std::atan(eig.values(i)) - rotation);
  }
  std::vector<Index> order(static_cast<std::size_t>(dim));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return raw(a) < raw(b); });

  spectrum.phases.resize(dim);
  spectrum.quasienergies.resize(dim);
  for (Index i = 0; i < dim; ++i) {
    spectrum.phases(i) = raw(order[static_cast<std::size_t>(i)]);
    spectrum.quasienergies(i) =
        quasienergy(spectrum.phases(i), spectrum.config.period);
  }
  if (with_vectors) {
    spectrum.real_vectors.resize(dim, dim);
    for (Index i = 0; i < dim; ++i) {
      spectrum.real_vectors.col(i) =
          eig.vectors.col(order[static_cast<std::size_t>(i)]);
    }
  }
  return spectrum;
}

Eigen::VectorXd eigenstate_iprs(const FloquetSpectrum& spectrum) {
  if (!spectrum.has_vectors()) throw ConfigError("IPR needs eigenvectors");
  return spectrum.real_vectors.array().square().square().colwise().sum().transpose();
}

double mean_ipr(const FloquetSpectrum& spectrum) {
  return eigenstate_iprs(spectrum).mean();
}

Eigen::MatrixXd eigenstate_magnetizations(const FloquetSpectrum& spectrum) {
  if (!spectrum.has_vectors()) throw ConfigError("magnetization needs eigenvectors");
  const Eigen::MatrixXd signs = site_signs(spectrum.config.sites);
  const Eigen::MatrixXd weights = spectrum.real_vectors.array().square().matrix();
  return signs.transpose() * weights;
}

namespace {

Eigen::VectorXd staggered_per_state(const Eigen::MatrixXd& magnetizations) {
  const Index sites = magnetizations.rows();
  Eigen::VectorXd stagger(sites);
  for (Index j = 0; j < sites; ++j) stagger(j) = (j % 2 == 0) ? -1.0 : 1.0;
  return (magnetizations.transpose() * stagger) / static_cast<double>(sites);
}

}  // namespace

double diagonal_ensemble_staggered_mag(const FloquetSpectrum& spectrum,
                                       const StateVector& psi0) {
  const Eigen::VectorXd weights = spectrum.overlaps(psi0).cwiseAbs2();
  return weights.dot(staggered_per_state(eigenstate_magnetizations(spectrum)));
}

Eigen::VectorXd eigenstate_entropies(const FloquetSpectrum& spectrum,
                                     int block_sites) {
  if (!spectrum.has_vectors()) throw ConfigError("entropy needs eigenvectors");
  const int sites = spectrum.config.sites;
  if (block_sites < 1 || block_sites >= sites) {
    throw ConfigError("block size must satisfy 1 <= A < L");
  }
  // The half kick is a product of single-site phases, so h * q and q have
  // the same entanglement.
  Eigen::VectorXd entropies(spectrum.dimension());
  for (Index alpha = 0; alpha < spectrum.dimension(); ++alpha) {
    entropies(alpha) =
        bipartite_entropy(spectrum.real_vectors.col(alpha), sites, block_sites);
  }
  return entropies;
}

double mean_half_chain_entropy(const FloquetSpectrum& spectrum) {
  if (spectrum.config.sites % 2 != 0) {
    throw ConfigError("half-chain entropy S_F requires even L");
  }
  return mean_block_entropy(spectrum, spectrum.config.sites / 2);
}

double mean_block_entropy(const FloquetSpectrum& spectrum, int block_sites) {
  return eigenstate_entropies(spectrum, block_sites).mean();
}

Eigen::VectorXd gap_ratios(const Eigen::VectorXd& sorted_phases) {
  const Index n = sorted_phases.size();
  if (n < 3) return Eigen::VectorXd();
  std::vector<double> ratios;
  ratios.reserve(static_cast<std::size_t>(n - 2));
  for (Index a = 0; a + 2 < n; ++a) {
    const double d1 = sorted_phases(a + 1) - sorted_phases(a);
    const double d2 = sorted_phases(a + 2) - sorted_phases(a + 1);
    const double hi = std::max(d1, d2);
    if (hi <= 0.0) continue;
    ratios.push_back(std::min(d1, d2) / hi);
  }
  return Eigen::Map<const Eigen::VectorXd>(ratios.data(),
                                           static_cast<Index>(ratios.size()));
}

double mean_gap_ratio(const Eigen::VectorXd& sorted_phases) {
  const Eigen::VectorXd r = gap_ratios(sorted_phases);
  if (r.size() == 0) throw NumericError("gap ratio needs three distinct levels");
  return r.mean();
}

std::vector<double> draw_center_offsets(int realizations, double offset_range,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-offset_range, offset_range);
  std::vector<double> offsets(static_cast<std::size_t>(realizations));
  for (double& o : offsets) o = offset_range > 0.0 ? dist(rng) : 0.0;
  return offsets;
}

GapRatioResult mean_gap_ratio(const ChainConfig& config, int realizations,
                              double offset_range, std::uint64_t seed) {
  if (realizations < 1) throw ConfigError("need at least one realization");
  if (offset_range < 0.0) throw ConfigError("offset range must be non-negative");
  GapRatioResult result;
  result.seed = seed;
  result.offsets = draw_center_offsets(realizations, offset_range, seed);
  FloquetOptions options;
  options.path = Propagation::dense;
  for (double offset : result.offsets) {
    ChainConfig c = config;
    c.center_offset = config.center_offset + offset;
    const FloquetOperator u = build_floquet(c, options);
    options.propagator = u.shared_propagator();
    const FloquetSpectrum s = diagonalize_floquet(u, false);
    result.realization_means.push_back(mean_gap_ratio(s.phases));
  }
  result.mean = std::accumulate(result.realization_means.begin(),
                                result.realization_means.end(), 0.0) /
                realizations;
  return result;
}

double effective_hamiltonian_energy(const FloquetSpectrum& spectrum,
                                    const StateVector& psi) {
  return spectrum.overlaps(psi).cwiseAbs2().dot(spectrum.quasienergies);
}

double thermal_energy(const Eigen::VectorXd& energies, double beta) {
  // Shift by the dominant end of the spectrum to keep exp() finite.
  const double ref = beta >= 0.0 ? energies.minCoeff() : energies.maxCoeff();
  const Eigen::ArrayXd w = (-beta * (energies.array() - ref)).exp();
  return (w * energies.array()).sum() / w.sum();
}

ThermalFit solve_inverse_temperature(const Eigen::VectorXd& energies,
                                     double target, double beta_max,
                                     int max_expansions) {
  const double lo_e = energies.minCoeff();
  const double hi_e = energies.maxCoeff();
  const double width = hi_e - lo_e;
  if (!(target >= lo_e && target <= hi_e)) {
    throw NumericError("inverse temperature: target energy outside the spectrum");
  }
  ThermalFit fit;
  fit.target_energy = target;
  const double tol = 1e-12 * std::max(width, 1e-300);

  double lo = -beta_max;
  double hi = beta_max;
  int expansions = 0;
  // E(beta) decreases: need E(lo) >= target >= E(hi).
  while ((thermal_energy(energies, lo) < target ||
          thermal_energy(energies, hi) > target) &&
         expansions < max_expansions) {
    if (thermal_energy(energies, lo) < target) lo *= 2.0;
    if (thermal_energy(energies, hi) > target) hi *= 2.0;
    ++expansions;
  }
  fit.bracket_low = lo;
  fit.bracket_high = hi;
  if (thermal_energy(energies, hi) > target) {
    fit.beta = hi;
    fit.saturated = true;
    fit.residual = std::abs(thermal_energy(energies, hi) - target);
    return fit;
  }
  if (thermal_energy(energies, lo) < target) {
    fit.beta = lo;
    fit.saturated = true;
    fit.residual = std::abs(thermal_energy(energies, lo) - target);
    return fit;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double e = thermal_energy(energies, mid);
    if (std::abs(e - target) <= tol) {
      lo = hi = mid;
      break;
    }
    if (e > target) lo = mid; else hi = mid;
  }
  fit.beta = 0.5 * (lo + hi);
  fit.residual = std::abs(thermal_energy(energies, fit.beta) - target);
  return fit;
}

ThermalFit effective_inverse_temperature(const FloquetSpectrum& spectrum,
                                         const StateVector& psi0,
                                         const ThermalFitOptions& options) {
  const double beta_max =
      options.beta_max > 0.0 ? options.beta_max : 1e3 * spectrum.config.period;
  const double target = effective_hamiltonian_energy(spectrum, psi0);
  return solve_inverse_temperature(spectrum.quasienergies, target, beta_max,
                                   options.max_expansions);
}

SpectralDiagnostics compute_diagnostics(const FloquetSpectrum& spectrum) {
  const int sites = spectrum.config.sites;
  SpectralDiagnostics d;
  d.iprs = eigenstate_iprs(spectrum);
  d.ipr = d.iprs.mean();
  d.staggered_per_state = staggered_per_state(eigenstate_magnetizations(spectrum));
  const StateVector neel = make_product_state(ProductSpec::neel(sites));
  d.staggered = spectrum.overlaps(neel).cwiseAbs2().dot(d.staggered_per_state);
  d.entropies = eigenstate_entropies(spectrum, sites / 2);
  d.entropy = d.entropies.mean();
  d.ratios = gap_ratios(spectrum.phases);
  d.gap_ratio = d.ratios.size() > 0 ? d.ratios.mean() : 0.0;
  return d;
}

}  // namespace kxy
