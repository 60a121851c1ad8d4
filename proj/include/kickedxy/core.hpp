#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace kxy {

using Complex = std::complex<double>;
using Index = Eigen::Index;

/// Invalid model parameters, state descriptions or command arguments.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed to reach its accuracy contract.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest chain the state-vector code accepts (2^26 amplitudes = 1 GiB).
inline constexpr int kMaxSites = 26;

/// Parameters of one kicked XY chain. Energies are in units of the field
/// Omega, times in units of hbar / Omega. Boundaries are always open.
struct ChainConfig {
  int sites = 11;              // L
  double coupling = 1.0;       // J
  double field = 1.0;          // Omega
  double kick = 0.0;           // K
  double period = 1.0 / 16.0;  // T
  double center_offset = 0.0;  // j_offset

  /// Kick center j0 = (L + 1) / 2 + j_offset, with sites numbered from 1.
  double center() const { return 0.5 * (sites + 1) + center_offset; }
  Index dimension() const { return Index{1} << sites; }

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

ChainConfig load_config(const std::filesystem::path& path);
void save_config(const ChainConfig& config, const std::filesystem::path& path);
std::string config_to_json(const ChainConfig& config);
ChainConfig config_from_json(const std::string& text);

// Basis convention: bit (j - 1) of a basis index is set when site j is up.
inline bool site_up(std::uint64_t basis_index, int site) {
  return (basis_index >> (site - 1)) & 1u;
}
inline double site_sign(std::uint64_t basis_index, int site) {
  return site_up(basis_index, site) ? 1.0 : -1.0;
}

/// Normalized amplitudes in the computational z basis of `sites` spins.
struct StateVector {
  int sites = 0;
  Eigen::VectorXcd amplitudes;

  Index dimension() const { return amplitudes.size(); }
  double norm() const { return amplitudes.norm(); }
};

enum class Spin : std::uint8_t { down = 0, up = 1 };

/// Per-site pattern of a computational basis (product) state.
struct ProductSpec {
  std::vector<Spin> pattern;

  int sites() const { return static_cast<int>(pattern.size()); }
  std::uint64_t basis_index() const;

  static ProductSpec neel(int sites);
  static ProductSpec vacuum(int sites);
  static ProductSpec single_excitation(int sites, int site);
  static ProductSpec domain_wall(int sites);
  /// Parses "UDUD..." (also accepts 1/0 and u/d).
  static ProductSpec from_string(const std::string& text);
};

StateVector make_product_state(const ProductSpec& spec);
/// Same as make_product_state, checking the pattern against `sites`.
StateVector make_product_state(const ProductSpec& spec, int sites);

/// (|up_i down_j> + |down_i up_j>) / sqrt(2) with every other site down.
StateVector make_bell_pair(int sites, int first, int second);
/// (|c> + |flip(c)>) / sqrt(2), c = down, up x floor(L/2), down for the rest.
StateVector make_global_bell(int sites);

/// Wraps raw amplitudes, checking dimension and normalization.
StateVector make_state(int sites, Eigen::VectorXcd amplitudes);

double sigma_z_expectation(const StateVector& psi, int site);
inline double spin_up_probability(const StateVector& psi, int site) {
  return 0.5 * (sigma_z_expectation(psi, site) + 1.0);
}
/// <sigma^z_j> for j = 1..L in one pass over the amplitudes.
Eigen::VectorXd sigma_z_profile(const StateVector& psi);

/// Density matrix of the contiguous block of sites 1..A.
struct ReducedDensityMatrix {
  int block_sites = 0;
  Eigen::MatrixXcd matrix;
};

/// Keeps sites 1..A and traces out A+1..L.
ReducedDensityMatrix reduce_to_block(const StateVector& psi, int block_sites);

/// Eigenvalues at or below this are treated as exact zeros.
inline constexpr double kEigenvalueFloor = 1e-14;

/// Von Neumann entropy -sum lambda ln lambda of a Hermitian unit-trace matrix.
template <typename Derived>
double von_neumann_entropy(const Eigen::MatrixBase<Derived>& rho) {
  using Scalar = typename Derived::Scalar;
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const MatrixType m = rho;
  if (m.rows() != m.cols()) throw NumericError("entropy: matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw NumericError("entropy: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<MatrixType> solver(m, Eigen::EigenvaluesOnly);
  double entropy = 0.0;
  for (double lambda : solver.eigenvalues()) {
    if (lambda > kEigenvalueFloor) entropy -= lambda * std::log(lambda);
  }
  return entropy;
}

double entanglement_entropy(const ReducedDensityMatrix& rho);

/// Entanglement entropy between sites 1..A and A+1..L of a pure state given
/// as raw amplitudes (real or complex). Uses the smaller Gram matrix.
template <typename Derived>
double bipartite_entropy(const Eigen::MatrixBase<Derived>& amplitudes,
                         int sites, int block_sites) {
  using Scalar = typename Derived::Scalar;
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Index left = Index{1} << block_sites;
  const Index right = Index{1} << (sites - block_sites);
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> column = amplitudes;
  const Eigen::Map<const MatrixType> psi(column.data(), left, right);
  MatrixType gram = left <= right ? MatrixType(psi * psi.adjoint())
                                  : MatrixType(psi.adjoint() * psi);
  Eigen::SelfAdjointEigenSolver<MatrixType> solver(gram,
                                                   Eigen::EigenvaluesOnly);
  double entropy = 0.0;
  for (double lambda : solver.eigenvalues()) {
    if (lambda > kEigenvalueFloor) entropy -= lambda * std::log(lambda);
  }
  return entropy;
}

/// Uhlmann fidelity [Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))]^2.
double uhlmann_fidelity(const ReducedDensityMatrix& rho1,
                        const ReducedDensityMatrix& rho2);

/// Principal square root of a Hermitian positive semidefinite matrix;
/// negative round-off eigenvalues are clamped to zero.
Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& rho);

}  // namespace kxy
