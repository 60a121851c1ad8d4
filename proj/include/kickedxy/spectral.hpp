#pragma once

#include "kickedxy/floquet.hpp"

#include <cstdint>
#include <vector>

namespace kxy {

/// Eigen-decomposition of a Floquet operator.
///
/// The eigenvalue of eigenvector alpha is exp(i theta_alpha) with theta in
/// (-pi, pi], sorted ascending. The quasi-energy of H_F = (i/T) ln U_F on
/// this branch is epsilon_alpha = -theta_alpha / T.
///
/// Eigenvectors are stored compactly. U_F = H M H^-1 with H = diag(h),
/// h = exp(-i angle / 2) the half kick, and M = H W H complex symmetric
/// (W = exp(-i H_XY T) is symmetric because H_XY is real). M therefore has
/// a real orthogonal eigenbasis Q and the eigenvectors of U_F are h * Q.
struct FloquetSpectrum {
  ChainConfig config;
  Eigen::VectorXd phases;
  Eigen::VectorXd quasienergies;
  Eigen::MatrixXd real_vectors;  // Q, empty for an eigenvalues-only run
  Eigen::VectorXcd half_kick;    // h

  Index dimension() const { return phases.size(); }
  bool has_vectors() const { return real_vectors.size() > 0; }
  Eigen::VectorXcd eigenvector(Index alpha) const;
  Eigen::MatrixXcd eigenvectors() const;
  /// c_alpha = <psi_alpha | psi> for every alpha.
  Eigen::VectorXcd overlaps(const StateVector& psi) const;
};

/// Full eigen-decomposition of a dense Floquet operator.
///
/// Works on the Cayley transform A = Im(M') (I + Re(M'))^-1 of the rotated
/// symmetric unitary M' = exp(i rho) M. Re and Im of a symmetric unitary
/// commute, so A is real symmetric with eigenvalues tan(theta'/2) and the
/// eigenvectors of M. The rotation rho keeps -1 away from the spectrum.
FloquetSpectrum diagonalize_floquet(const FloquetOperator& floquet,
                                    bool with_vectors = true);

/// Mean IPR (1/D) sum_alpha sum_p |<p|psi_alpha>|^4.
double mean_ipr(const FloquetSpectrum& spectrum);
Eigen::VectorXd eigenstate_iprs(const FloquetSpectrum& spectrum);

/// (L x D) matrix of <psi_alpha|sigma^z_j|psi_alpha>.
Eigen::MatrixXd eigenstate_magnetizations(const FloquetSpectrum& spectrum);

/// O_F = (1/L) sum_j sum_alpha (-1)^j |c_alpha|^2 <psi_alpha|sigma^z_j|psi_alpha>.
double diagonal_ensemble_staggered_mag(const FloquetSpectrum& spectrum,
                                       const StateVector& psi0);

/// Entanglement entropy of every eigenstate for the block of sites 1..A.
Eigen::VectorXd eigenstate_entropies(const FloquetSpectrum& spectrum,
                                     int block_sites);
/// S_F for even L: mean over eigenstates of the half-chain entropy.
/// Throws ConfigError for odd L.
double mean_half_chain_entropy(const FloquetSpectrum& spectrum);
/// Same average with block sites 1..A (A = floor(L/2) for odd chains).
double mean_block_entropy(const FloquetSpectrum& spectrum, int block_sites);

/// r_alpha = min(d_alpha, d_alpha+1) / max(d_alpha, d_alpha+1) for the
/// consecutive gaps d of ascending `sorted_phases`, no wrap-around gap.
Eigen::VectorXd gap_ratios(const Eigen::VectorXd& sorted_phases);
double mean_gap_ratio(const Eigen::VectorXd& sorted_phases);

struct GapRatioResult {
  double mean = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> offsets;
  std::vector<double> realization_means;
};

/// r-bar averaged over `realizations` kick-center offsets drawn uniformly
/// from [-offset_range, offset_range] with a seeded generator.
GapRatioResult mean_gap_ratio(const ChainConfig& config, int realizations,
                              double offset_range, std::uint64_t seed = 2024);

/// The offsets mean_gap_ratio draws for a given seed.
std::vector<double> draw_center_offsets(int realizations, double offset_range,
                                        std::uint64_t seed);

/// <psi|H_F|psi> = sum_alpha |c_alpha|^2 epsilon_alpha.
double effective_hamiltonian_energy(const FloquetSpectrum& spectrum,
                                    const StateVector& psi);

/// Thermal energy E(beta) = sum eps exp(-beta eps) / sum exp(-beta eps).
double thermal_energy(const Eigen::VectorXd& energies, double beta);

struct ThermalFit {
  double beta = 0.0;
  double target_energy = 0.0;  // epsilon_p
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  double residual = 0.0;       // |E(beta) - epsilon_p|
  bool saturated = false;      // beta pinned at the bracket limit
};

struct ThermalFitOptions {
  double beta_max = -1.0;      // <= 0 selects 1e3 T
  int max_expansions = 20;     // geometric doublings of the bracket
};

/// Solves E(beta_eff) = <psi0|H_F|psi0> by bisection. Throws NumericError
/// when the target lies outside [epsilon_min, epsilon_max].
ThermalFit effective_inverse_temperature(const FloquetSpectrum& spectrum,
                                         const StateVector& psi0,
                                         const ThermalFitOptions& options = {});
ThermalFit solve_inverse_temperature(const Eigen::VectorXd& energies,
                                     double target, double beta_max,
                                     int max_expansions = 20);

struct SpectralDiagnostics {
  double ipr = 0.0;               // I_F
  double staggered = 0.0;         // O_F from the Neel state
  double entropy = 0.0;           // S_F, block floor(L/2)
  double gap_ratio = 0.0;         // r-bar of this spectrum
  Eigen::VectorXd iprs;
  Eigen::VectorXd staggered_per_state;  // (1/L) sum_j (-1)^j <sigma^z_j>
  Eigen::VectorXd entropies;
  Eigen::VectorXd ratios;
};

/// Every eigenstate diagnostic of one spectrum, with the Neel initial state.
SpectralDiagnostics compute_diagnostics(const FloquetSpectrum& spectrum);

}  // namespace kxy
