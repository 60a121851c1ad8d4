#include "kickedxy/floquet.hpp"

#include "symmetric_eigen.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace kxy {

double flip_flop_element(double coupling) {
  return 2.0 * coupling;
}

StaticHamiltonian::StaticHamiltonian(const ChainConfig& config)
    : sites_(config.sites),
      field_(config.field),
      hop_(flip_flop_element(config.coupling)) {
  config.validate();
}

void StaticHamiltonian::apply(const Eigen::VectorXcd& in,
                              Eigen::VectorXcd& out) const {
  // Works tile by tile so every term is a contiguous, branch-free update.
  // Bits below `low` stay inside a cache-resident tile; a higher bit maps
  // the whole tile onto one partner tile.
  constexpr int kTileBits = 12;
  const Index dim = dimension();
  out.resize(dim);
  const Complex* x = in.data();
  Complex* y = out.data();
  const double field = field_;
  const double hop = hop_;
  const int sites = sites_;
  const int low = std::min(sites, kTileBits);
  const Index tile = Index{1} << low;
  for (Index base = 0; base < dim; base += tile) {
    Complex* yt = y + base;
    const Complex* xt = x + base;
    std::fill(yt, yt + tile, Complex(0.0, 0.0));
    // Field on a low site swaps the halves of every block of 2h.
    for (int j = 0; j < low; ++j) {
      const Index h = Index{1} << j;
      for (Index b = 0; b < tile; b += 2 * h) {
        for (Index i = 0; i < h; ++i) {
          yt[b + i] += field * xt[b + h + i];
          yt[b + h + i] += field * xt[b + i];
        }
      }
    }
    // Flip-flop on a low bond exchanges the 01 and 10 quarters of every block of 4q.
    for (int j = 0; j + 1 < low; ++j) {
      const Index q = Index{1} << j;
      for (Index b = 0; b < tile; b += 4 * q) {
        for (Index i = 0; i < q; ++i) {
          yt[b + q + i] += hop * xt[b + 2 * q + i];
          yt[b + 2 * q + i] += hop * xt[b + q + i];
        }
      }
    }
    for (int j = low; j < sites; ++j) {
      const Complex* src = x + (base ^ (Index{1} << j));
      for (Index i = 0; i < tile; ++i) yt[i] += field * src[i];
    }
    if (low < sites) {
      // Bond (low - 1, low): only the half of the tile whose top bit differs
      // from bit `low` of the tile index takes part.
      const Index half = tile / 2;
      const Index dst = ((base >> low) & 1) ? 0 : half;
      const Complex* src = x + (base ^ tile) + (dst ^ half);
      for (Index i = 0; i < half; ++i) yt[dst + i] += hop * src[i];
    }
    for (int j = low; j + 1 < sites; ++j) {
      if ((((base >> j) ^ (base >> (j + 1))) & 1) == 0) continue;
      const Complex* src = x + (base ^ (Index{3} << j));
      for (Index i = 0; i < tile; ++i) yt[i] += hop * src[i];
    }
  }
}

Eigen::VectorXcd StaticHamiltonian::operator*(const Eigen::VectorXcd& in) const {
  Eigen::VectorXcd out;
  apply(in, out);
  return out;
}

Eigen::MatrixXd StaticHamiltonian::dense() const {
  const Index dim = dimension();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (Index b = 0; b < dim; ++b) {
    for (int j = 0; j < sites_; ++j) h(b ^ (Index{1} << j), b) += field_;
    for (int j = 0; j + 1 < sites_; ++j) {
      if (((b ^ (b >> 1)) >> j) & 1) h(b ^ (Index{3} << j), b) += hop_;
    }
  }
  return h;
}

double StaticHamiltonian::norm_bound() const {
  return sites_ * std::abs(field_) + (sites_ - 1) * std::abs(hop_);
}

StaticHamiltonian build_static_hamiltonian(const ChainConfig& config) {
  return StaticHamiltonian(config);
}

KickProfile build_kick_profile(const ChainConfig& config) {
  config.validate();
  const int sites = config.sites;
  const Index dim = config.dimension();
  const double center = config.center();
  KickProfile kick;
  kick.coefficients.resize(sites);
  for (int j = 1; j <= sites; ++j) {
    const double d = j - center;
    kick.coefficients(j - 1) = config.kick * config.period * d * d;
  }
  kick.angles.resize(dim);
  kick.phases.resize(dim);
  for (Index b = 0; b < dim; ++b) {
    double angle = 0.0;
    for (int j = 0; j < sites; ++j) {
      angle += ((b >> j) & 1) ? kick.coefficients(j) : -kick.coefficients(j);
    }
    kick.angles(b) = angle;
    kick.phases(b) = std::polar(1.0, -angle);
  }
  return kick;
}

bool StaticPropagator::matches(const ChainConfig& config) const {
  return sites == config.sites && coupling == config.coupling &&
         field == config.field && period == config.period;
}

Eigen::MatrixXcd StaticPropagator::matrix() const {
  Eigen::MatrixXcd w(dimension(), dimension());
  w.real() = cos_part;
  w.imag() = -sin_part;
  return w;
}

Eigen::MatrixXcd StaticPropagator::evolution(double time) const {
  const Eigen::VectorXcd phases =
      (energies * (-time)).unaryExpr([](double a) { return std::polar(1.0, a); });
  const Eigen::MatrixXcd v = modes.cast<Complex>();
  return v * phases.asDiagonal() * v.transpose();
}

std::shared_ptr<const StaticPropagator> build_static_propagator(
    const ChainConfig& config) {
  const StaticHamiltonian h(config);
  detail::SymmetricEigen eig = detail::symmetric_eigen(h.dense(), true);
  auto prop = std::make_shared<StaticPropagator>();
  prop->sites = config.sites;
  prop->coupling = config.coupling;
  prop->field = config.field;
  prop->period = config.period;
  prop->energies = std::move(eig.values);
  prop->modes = std::move(eig.vectors);
  const Eigen::ArrayXd angle = prop->energies.array() * config.period;
  const Eigen::MatrixXd& v = prop->modes;
  prop->cos_part.noalias() = v * angle.cos().matrix().asDiagonal() * v.transpose();
  prop->sin_part.noalias() = v * angle.sin().matrix().asDiagonal() * v.transpose();
  return prop;
}

namespace {

struct LanczosWorkspace {
  std::vector<Eigen::VectorXcd> basis;
  Eigen::VectorXcd w;
};

// One Lanczos propagation of psi over `time`. Returns false when the
// subspace limit is reached before the error estimate drops below tolerance.
bool lanczos_step(const StaticHamiltonian& h, double time,
                  Eigen::VectorXcd& psi, const KrylovOptions& options,
                  LanczosWorkspace& ws, KrylovStats& stats) {
  const double beta0 = psi.norm();
  if (beta0 == 0.0) return true;
  const int max_dim = std::max(2, options.max_dimension);
  if (static_cast<int>(ws.basis.size()) < max_dim) ws.basis.resize(max_dim);
  std::vector<double> alpha;
  std::vector<double> beta;
  ws.basis[0] = psi / beta0;
  const double breakdown = 1e-14 * std::max(1.0, h.norm_bound());
  for (int k = 0; k < max_dim; ++k) {
    h.apply(ws.basis[k], ws.w);
    ++stats.iterations;
    const double a = ws.basis[k].dot(ws.w).real();
    ws.w -= a * ws.basis[k];
    if (k > 0) ws.w -= beta.back() * ws.basis[k - 1];
    // Local re-orthogonalization against the two latest vectors.
    ws.w -= ws.basis[k].dot(ws.w) * ws.basis[k];
    if (k > 0) ws.w -= ws.basis[k - 1].dot(ws.w) * ws.basis[k - 1];
    alpha.push_back(a);
    const double b = ws.w.norm();

    const int m = k + 1;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub(std::max(0, m - 1));
    for (int i = 0; i + 1 < m; ++i) sub(i) = beta[i];
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::MatrixXd& q = tri.eigenvectors();
    const Eigen::VectorXcd phases = (tri.eigenvalues() * (-time)).unaryExpr(
        [](double x) { return std::polar(1.0, x); });
    const Eigen::VectorXcd coeffs =
        q.cast<Complex>() * phases.cwiseProduct(q.row(0).transpose().cast<Complex>());
    const double error = b * std::abs(coeffs(m - 1));
    const bool invariant = b < breakdown;
    if (invariant || error < options.tolerance) {
      psi.setZero();
      for (int i = 0; i < m; ++i) psi += (beta0 * coeffs(i)) * ws.basis[i];
      stats.error_estimate = std::max(stats.error_estimate, invariant ? 0.0 : error);
      return true;
    }
    if (m == max_dim) return false;
    beta.push_back(b);
    ws.basis[k + 1] = ws.w / b;
  }
  return false;
}

}  // namespace

void krylov_propagate(const StaticHamiltonian& hamiltonian, double time,
                      Eigen::VectorXcd& psi, const KrylovOptions& options,
                      KrylovStats* stats) {
  thread_local LanczosWorkspace ws;
  KrylovStats local;
  int pieces = 1;
  while (pieces <= options.max_substeps) {
    Eigen::VectorXcd trial = psi;
    KrylovStats attempt;
    bool ok = true;
    for (int s = 0; s < pieces && ok; ++s) {
      ok = lanczos_step(hamiltonian, time / pieces, trial, options, ws, attempt);
    }
    local.iterations += attempt.iterations;
    if (ok) {
      psi = std::move(trial);
      local.substeps = pieces;
      local.error_estimate = attempt.error_estimate;
      if (stats) *stats = local;
      return;
    }
    pieces *= 2;
  }
  throw NumericError("Krylov propagation did not converge: L = " +
                     std::to_string(hamiltonian.sites()) + ", time = " +
                     std::to_string(time) + ", subspace limit " +
                     std::to_string(options.max_dimension) + ", " +
                     std::to_string(options.max_substeps) + " substeps");
}

int dense_max_sites() {
  constexpr int kDefault = 12;
  if (const char* env = std::getenv("KXY_DENSE_MAX_SITES")) {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("invalid KXY_DENSE_MAX_SITES: ") + env);
    }
  }
  return kDefault;
}

FloquetOperator::FloquetOperator(const ChainConfig& config,
                                 const FloquetOptions& options)
    : config_(config),
      kick_(build_kick_profile(config)),
      hamiltonian_(config),
      krylov_(options.krylov) {
  const bool dense =
      options.path == Propagation::dense ||
      (options.path == Propagation::automatic && config.sites <= dense_max_sites());
  if (!dense) return;
  if (options.path == Propagation::dense && config.sites > dense_max_sites()) {
    throw ConfigError("dense Floquet operator requested for L = " +
                      std::to_string(config.sites) + " above the dense limit " +
                      std::to_string(dense_max_sites()));
  }
  if (options.propagator && options.propagator->matches(config)) {
    propagator_ = options.propagator;
  } else {
    propagator_ = build_static_propagator(config);
  }
}

const StaticPropagator& FloquetOperator::static_propagator() const {
  if (!propagator_) throw ConfigError("Floquet operator is matrix-free");
  return *propagator_;
}

Eigen::MatrixXcd FloquetOperator::dense_matrix() const {
  return kick_.phases.asDiagonal() * static_propagator().matrix();
}

void FloquetOperator::apply_in_place(Eigen::VectorXcd& psi,
                                     KrylovStats* stats) const {
  if (psi.size() != dimension()) {
    throw ConfigError("state dimension does not match the Floquet operator");
  }
  if (propagator_) {
    const Eigen::VectorXd re = psi.real();
    const Eigen::VectorXd im = psi.imag();
    // (C - i S)(re + i im) = (C re + S im) + i (C im - S re)
    Eigen::VectorXd out_re = propagator_->cos_part * re;
    out_re.noalias() += propagator_->sin_part * im;
    Eigen::VectorXd out_im = propagator_->cos_part * im;
    out_im.noalias() -= propagator_->sin_part * re;
    psi.real() = out_re;
    psi.imag() = out_im;
  } else {
    krylov_propagate(hamiltonian_, config_.period, psi, krylov_, stats);
  }
  psi.array() *= kick_.phases.array();
}

FloquetOperator build_floquet(const ChainConfig& config,
                              const FloquetOptions& options) {
  return FloquetOperator(config, options);
}

StateVector apply_floquet(const FloquetOperator& floquet,
                          const StateVector& psi) {
  StateVector out = psi;
  floquet.apply_in_place(out.amplitudes);
  return out;
}

void EvolutionSchedule::validate() const {
  if (kicks < 0) throw ConfigError("number of kicks must be non-negative");
  if (record_stride < 1) throw ConfigError("record stride must be at least 1");
}

void evolve_each(const FloquetOperator& floquet, const StateVector& psi0,
                 const EvolutionSchedule& schedule,
                 const std::function<void(int, const StateVector&)>& visit) {
  schedule.validate();
  if (psi0.sites != floquet.config().sites) {
    throw ConfigError("initial state size does not match the chain");
  }
  StateVector psi = psi0;
  visit(0, psi);
  for (int n = 1; n <= schedule.kicks; ++n) {
    floquet.apply_in_place(psi.amplitudes);
    if (n % schedule.record_stride == 0) visit(n, psi);
  }
}

std::vector<StateVector> evolve(const FloquetOperator& floquet,
                                const StateVector& psi0,
                                const EvolutionSchedule& schedule) {
  std::vector<StateVector> snapshots;
  snapshots.reserve(static_cast<std::size_t>(schedule.snapshot_count()));
  evolve_each(floquet, psi0, schedule,
              [&](int, const StateVector& psi) { snapshots.push_back(psi); });
  return snapshots;
}

}  // namespace kxy
