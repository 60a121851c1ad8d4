// Randomized invariants over seeded parameter draws. Built as its own
// binary so it can run without anything else in the tree.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kickedxy/dynamics.hpp"
#include "kickedxy/scaling.hpp"
#include "kickedxy/spectral.hpp"
#include "test_support.hpp"

#include <random>

using namespace kxy;

namespace {

struct Draw {
  std::mt19937_64 rng;
  explicit Draw(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  ChainConfig chain(int min_sites, int max_sites) {
    ChainConfig c;
    c.sites = integer(min_sites, max_sites);
    c.coupling = uniform(0.0, 3.0);
    c.field = uniform(0.2, 1.5);
    c.kick = uniform(0.0, 6.0);
    c.center_offset = uniform(-0.05, 0.05);
    return c;
  }
};

constexpr int kTrials = 12;

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("Floquet operators are unitary") {
  Draw d(101);
  for (int t = 0; t < kTrials; ++t) {
    const ChainConfig c = d.chain(2, 7);
    CAPTURE(c.sites);
    const Eigen::MatrixXcd u = build_floquet(c, {Propagation::dense}).dense_matrix();
    const Index n = u.rows();
    CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-11);
    const FloquetOperator k = build_floquet(c, {Propagation::krylov});
    const StateVector psi = test::random_state(c.sites, 500 + t);
    CHECK(apply_floquet(k, psi).norm() == doctest::Approx(1.0).epsilon(1e-11));
  }
}

TEST_CASE("J = 0 evolution factorizes") {
  Draw d(202);
  for (int t = 0; t < kTrials; ++t) {
    ChainConfig c = d.chain(2, 7);
    c.coupling = 0.0;
    const Eigen::MatrixXcd oracle = test::product_floquet(c);
    for (Propagation path : {Propagation::dense, Propagation::krylov}) {
      const FloquetOperator u = build_floquet(c, {path});
      const StateVector psi = test::random_state(c.sites, 900 + t);
      StateVector s = psi;
      Eigen::VectorXcd expected = psi.amplitudes;
      for (int n = 0; n < 7; ++n) {
        s = apply_floquet(u, s);
        expected = oracle * expected;
      }
      CHECK((s.amplitudes - expected).norm() < 1e-10);
    }
  }
}

TEST_CASE("dense and Krylov evolution agree to 1e-9") {
  Draw d(303);
  for (int t = 0; t < kTrials; ++t) {
    const ChainConfig c = d.chain(4, 9);
    CAPTURE(c.sites);
    CAPTURE(c.coupling);
    const FloquetOperator dense = build_floquet(c, {Propagation::dense});
    const FloquetOperator krylov = build_floquet(c, {Propagation::krylov});
    const StateVector psi = test::random_state(c.sites, 40 + t);
    const auto a = evolve(dense, psi, {30, 10});
    const auto b = evolve(krylov, psi, {30, 10});
    for (std::size_t s = 0; s < a.size(); ++s) {
      CHECK((a[s].amplitudes - b[s].amplitudes).norm() < 1e-9);
    }
  }
}

TEST_CASE("entanglement entropy is symmetric under the cut") {
  Draw d(404);
  for (int t = 0; t < kTrials; ++t) {
    const int sites = d.integer(2, 10);
    const StateVector psi = test::random_state(sites, 70 + t);
    for (int a = 1; a < sites; ++a) {
      // S(1..A) from the left block equals S(A+1..L) from the complement,
      // which is the left block of the reversed chain.
      Eigen::VectorXcd reversed(psi.dimension());
      for (Index b = 0; b < psi.dimension(); ++b) {
        Index r = 0;
        for (int j = 1; j <= sites; ++j) {
          if (site_up(b, j)) r |= Index{1} << (sites - j);
        }
        reversed(r) = psi.amplitudes(b);
      }
      const double left = entanglement_entropy(reduce_to_block(psi, a));
      const double right = entanglement_entropy(reduce_to_block({sites, reversed}, sites - a));
      CHECK(left == doctest::Approx(right).epsilon(1e-10));
      CHECK(left <= std::min(a, sites - a) * std::log(2.0) + 1e-12);
    }
  }
}

TEST_CASE("Uhlmann fidelity matches the singular value form") {
  Draw d(505);
  for (int t = 0; t < kTrials; ++t) {
    const int sites = d.integer(3, 8);
    const int a = d.integer(1, sites - 1);
    const StateVector x = test::random_state(sites, 1000 + t);
    const StateVector y = test::random_state(sites, 2000 + t);
    const ReducedDensityMatrix rx = reduce_to_block(x, a);
    const ReducedDensityMatrix ry = reduce_to_block(y, a);
    const double f = uhlmann_fidelity(rx, ry);
    // Near-zero eigenvalues enter through a square root, so 1e-7 not 1e-12.
    CHECK(f == doctest::Approx(test::svd_fidelity(rx.matrix, ry.matrix)).epsilon(1e-7));
    CHECK(f == doctest::Approx(uhlmann_fidelity(ry, rx)).epsilon(1e-7));
    CHECK(f >= -1e-12);
    CHECK(f <= 1.0 + 1e-12);
  }
}

TEST_CASE("trajectory invariants") {
  Draw d(606);
  for (int t = 0; t < 6; ++t) {
    const ChainConfig c = d.chain(4, 9);
    const int a = d.integer(1, c.sites - 1);
    const TimeSeries ts = run_dynamics(c, test::random_state(c.sites, 3000 + t), {24, 3}, a);
    CHECK(ts.fidelity(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(ts.up_probability.minCoeff() >= 0.0);
    CHECK(ts.up_probability.maxCoeff() <= 1.0);
    CHECK(ts.imbalance.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(ts.fidelity.minCoeff() >= 0.0);
    CHECK(ts.fidelity.maxCoeff() <= 1.0);
    CHECK(ts.entropy.minCoeff() >= 0.0);
  }
}

TEST_CASE("synthetic collapse recovers the planted point") {
  Draw d(707);
  for (int t = 0; t < 4; ++t) {
    const double kc = d.uniform(0.3, 0.6);
    const double nu = d.uniform(0.55, 0.9);
    CAPTURE(kc);
    CAPTURE(nu);
    ScalingDataset data;
    for (int l : {8, 10, 12}) {
      for (int i = 0; i <= 20; ++i) {
        const double k = 0.05 * i;
        data.points.push_back(
            {1.0, k, l, {std::tanh((k - kc) * std::pow(double(l), 1.0 / nu) / 10.0)}});
      }
    }
    CollapseOptions opt;
    opt.bootstrap = 0;
    const CollapseResult r = collapse(data, opt);
    CHECK(r.critical_kick == doctest::Approx(kc).epsilon(0.025 / kc));
    CHECK(r.nu == doctest::Approx(nu).epsilon(0.05 / nu));
    CHECK_FALSE(r.non_critical);
  }
}

}  // TEST_SUITE
