#pragma once

// Independent reference implementations for the unit and property tests.

#include "kickedxy/core.hpp"

#include <cmath>
#include <random>

namespace kxy::test {

inline StateVector random_state(int sites, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(Index{1} << sites);
  for (Index i = 0; i < v.size(); ++i) v(i) = Complex(g(rng), g(rng));
  v.normalize();
  return StateVector{sites, v};
}

inline Eigen::MatrixXcd random_unitary(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd z(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) z(i, j) = Complex(g(rng), g(rng)) / std::sqrt(2.0);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
  return q;
}

// rho_A(i, i') summed over the environment, one site at a time.
inline Eigen::MatrixXcd brute_force_partial_trace(const StateVector& psi, int block) {
  const int sites = psi.sites;
  const Index kept = Index{1} << block;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(kept, kept);
  for (Index b = 0; b < psi.dimension(); ++b) {
    for (Index c = 0; c < psi.dimension(); ++c) {
      bool same_env = true;
      for (int j = block + 1; j <= sites && same_env; ++j) {
        same_env = site_up(b, j) == site_up(c, j);
      }
      if (!same_env) continue;
      Index i = 0, k = 0;
      for (int j = 1; j <= block; ++j) {
        if (site_up(b, j)) i += Index{1} << (j - 1);
        if (site_up(c, j)) k += Index{1} << (j - 1);
      }
      rho(i, k) += psi.amplitudes(b) * std::conj(psi.amplitudes(c));
    }
  }
  return rho;
}

// (sum of singular values of sqrt(rho1) sqrt(rho2))^2.
inline double svd_fidelity(const Eigen::MatrixXcd& rho1, const Eigen::MatrixXcd& rho2) {
  // Clamp round-off negatives: reduced states of large blocks are rank deficient.
  const auto root = [](const Eigen::MatrixXcd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s(rho);
    const Eigen::VectorXd w = s.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return Eigen::MatrixXcd(s.eigenvectors() * w.asDiagonal() * s.eigenvectors().adjoint());
  };
  const Eigen::MatrixXcd prod = root(rho1) * root(rho2);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(prod);
  const double t = svd.singularValues().sum();
  return t * t;
}

// One-site Floquet matrix exp(-i kappa sigma^z) exp(-i Omega T sigma^x) in
// the (down, up) basis, i.e. indexed by the site bit.
inline Eigen::Matrix2cd single_site_floquet(double kappa, double omega_t) {
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd rot;
  rot << std::cos(omega_t), -i * std::sin(omega_t), -i * std::sin(omega_t),
      std::cos(omega_t);
  Eigen::Matrix2cd kick = Eigen::Matrix2cd::Zero();
  kick(0, 0) = std::exp(i * kappa);   // down: sigma^z = -1
  kick(1, 1) = std::exp(-i * kappa);  // up
  return kick * rot;
}

// Dense J = 0 Floquet operator as an explicit tensor product.
inline Eigen::MatrixXcd product_floquet(const ChainConfig& c) {
  const Index dim = c.dimension();
  std::vector<Eigen::Matrix2cd> local;
  for (int j = 1; j <= c.sites; ++j) {
    const double d = j - c.center();
    local.push_back(single_site_floquet(c.kick * c.period * d * d, c.field * c.period));
  }
  Eigen::MatrixXcd u(dim, dim);
  for (Index r = 0; r < dim; ++r) {
    for (Index s = 0; s < dim; ++s) {
      Complex v = 1.0;
      for (int j = 1; j <= c.sites; ++j) {
        v *= local[j - 1](site_up(r, j) ? 1 : 0, site_up(s, j) ? 1 : 0);
      }
      u(r, s) = v;
    }
  }
  return u;
}

// P_up(n) of a lone spin under the one-site Floquet matrix.
inline double single_spin_up_probability(double kappa, double omega_t, bool starts_up,
                                         int kicks) {
  const Eigen::Matrix2cd u = single_site_floquet(kappa, omega_t);
  Eigen::Vector2cd v = Eigen::Vector2cd::Zero();
  v(starts_up ? 1 : 0) = 1.0;
  for (int n = 0; n < kicks; ++n) v = u * v;
  return std::norm(v(1));
}

}  // namespace kxy::test
