#pragma once

#include "kickedxy/core.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace kxy {

/// Matrix element of J (s+_j s-_{j+1} + h.c.) between |..up down..> and
/// |..down up..>, with s+- = sigma^x +- i sigma^y taken literally.
double flip_flop_element(double coupling);

/// H_XY = sum_j J (s+_j s-_{j+1} + h.c.) + Omega sigma^x_j, open chain.
/// Real symmetric in the z basis; applied matrix-free or expanded densely.
class StaticHamiltonian {
 public:
  explicit StaticHamiltonian(const ChainConfig& config);

  int sites() const { return sites_; }
  Index dimension() const { return Index{1} << sites_; }

  /// out = H in.
  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
  Eigen::VectorXcd operator*(const Eigen::VectorXcd& in) const;

  Eigen::MatrixXd dense() const;

  /// Upper bound on the spectral radius (sum of term norms).
  double norm_bound() const;

 private:
  int sites_;
  double field_;
  double hop_;
};

StaticHamiltonian build_static_hamiltonian(const ChainConfig& config);

/// Diagonal kick exp(-i sum_j kappa_j sigma^z_j), kappa_j = K T (j - j0)^2.
struct KickProfile {
  Eigen::VectorXd coefficients;  // kappa_j for j = 1..L
  Eigen::VectorXd angles;        // per basis state: sum_j kappa_j s_j
  Eigen::VectorXcd phases;       // exp(-i angle)

  Index dimension() const { return phases.size(); }
};

KickProfile build_kick_profile(const ChainConfig& config);

/// Dense exp(-i H_XY T) from the eigendecomposition H_XY = V diag(E) V^T.
/// The propagator is stored as W = C - i S with C = V cos(E T) V^T and
/// S = V sin(E T) V^T, both real symmetric. Depends on (L, J, Omega, T)
/// only, so one instance can be shared by every kick strength and offset.
struct StaticPropagator {
  int sites = 0;
  double coupling = 0.0;
  double field = 0.0;
  double period = 0.0;
  Eigen::VectorXd energies;
  Eigen::MatrixXd modes;
  Eigen::MatrixXd cos_part;
  Eigen::MatrixXd sin_part;

  Index dimension() const { return energies.size(); }
  bool matches(const ChainConfig& config) const;
  Eigen::MatrixXcd matrix() const;
  /// exp(-i H_XY t) for an arbitrary time, rebuilt from the modes.
  Eigen::MatrixXcd evolution(double time) const;
};

std::shared_ptr<const StaticPropagator> build_static_propagator(
    const ChainConfig& config);

struct KrylovOptions {
  double tolerance = 1e-12;  // a-posteriori error per propagation step
  int max_dimension = 40;
  int max_substeps = 256;
};

struct KrylovStats {
  int iterations = 0;  // matrix-vector products
  int substeps = 0;
  double error_estimate = 0.0;
};

/// psi <- exp(-i H time) psi by Lanczos with adaptive subspace dimension.
/// Splits the step when the subspace limit is reached; throws NumericError
/// when even max_substeps pieces do not converge.
void krylov_propagate(const StaticHamiltonian& hamiltonian, double time,
                      Eigen::VectorXcd& psi, const KrylovOptions& options = {},
                      KrylovStats* stats = nullptr);

enum class Propagation { automatic, dense, krylov };

/// Largest L evolved with a dense propagator when Propagation::automatic is
/// used. Defaults to 12; the KXY_DENSE_MAX_SITES environment variable can
/// lower (or raise) it.
int dense_max_sites();

struct FloquetOptions {
  Propagation path = Propagation::automatic;
  KrylovOptions krylov;
  /// Reused when it matches (L, J, Omega, T); built otherwise.
  std::shared_ptr<const StaticPropagator> propagator;
};

/// U_F = exp(-i K T sum_j (j - j0)^2 sigma^z_j) exp(-i H_XY T).
/// Immutable once built; apply() is reentrant.
class FloquetOperator {
 public:
  FloquetOperator(const ChainConfig& config, const FloquetOptions& options);

  const ChainConfig& config() const { return config_; }
  const KickProfile& kick() const { return kick_; }
  const StaticHamiltonian& hamiltonian() const { return hamiltonian_; }
  bool is_dense() const { return propagator_ != nullptr; }
  /// Throws ConfigError on the matrix-free path.
  const StaticPropagator& static_propagator() const;
  std::shared_ptr<const StaticPropagator> shared_propagator() const {
    return propagator_;
  }
  Index dimension() const { return kick_.dimension(); }

  /// The full D x D unitary (dense path only).
  Eigen::MatrixXcd dense_matrix() const;

  /// One kick cycle in place: static evolution, then the kick phases.
  void apply_in_place(Eigen::VectorXcd& psi, KrylovStats* stats = nullptr) const;

 private:
  ChainConfig config_;
  KickProfile kick_;
  StaticHamiltonian hamiltonian_;
  std::shared_ptr<const StaticPropagator> propagator_;
  KrylovOptions krylov_;
};

FloquetOperator build_floquet(const ChainConfig& config,
                              const FloquetOptions& options = {});

StateVector apply_floquet(const FloquetOperator& floquet,
                          const StateVector& psi);

struct EvolutionSchedule {
  int kicks = 0;        // N_T
  int record_stride = 1;

  void validate() const;
  /// Number of snapshots including t = 0.
  int snapshot_count() const { return kicks / record_stride + 1; }
};

/// Calls `visit(n, psi)` for n = 0, stride, 2 stride, ... <= kicks, where
/// psi = U_F^n psi0.
void evolve_each(const FloquetOperator& floquet, const StateVector& psi0,
                 const EvolutionSchedule& schedule,
                 const std::function<void(int, const StateVector&)>& visit);

std::vector<StateVector> evolve(const FloquetOperator& floquet,
                                const StateVector& psi0,
                                const EvolutionSchedule& schedule);

}  // namespace kxy
