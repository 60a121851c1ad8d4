#include "kickedxy/scaling.hpp"

#include <doctest.h>

#include <cmath>

using namespace kxy;

namespace {

// Master curve tanh(x / 10): its crossover spans several K grid steps.
double master(double x) { return std::tanh(x / 10.0); }

ScalingDataset planted(double kc, double nu, int realizations = 1) {
  ScalingDataset d;
  for (int l : {8, 10, 12}) {
    for (int i = 0; i <= 20; ++i) {
      const double k = 0.05 * i;
      const double x = (k - kc) * std::pow(double(l), 1.0 / nu);
      ScalingPoint p{1.0, k, l, {}};
      for (int r = 0; r < realizations; ++r) p.samples.push_back(master(x));
      d.points.push_back(p);
    }
  }
  return d;
}

}  // namespace

TEST_SUITE("scaling") {

TEST_CASE("observable tags") {
  CHECK(parse_observable("O_F") == ScalingObservable::staggered);
  CHECK(parse_observable("S_F/L") == ScalingObservable::entropy_density);
  CHECK(to_string(ScalingObservable::staggered) == "O_F");
  CHECK_THROWS_AS(parse_observable("I_F"), ConfigError);
}

TEST_CASE("planted collapse is recovered") {
  CollapseOptions opt;
  opt.bootstrap = 10;
  const CollapseResult r = collapse(planted(0.4, 0.7), opt);
  CHECK(r.critical_kick == doctest::Approx(0.40).epsilon(0.025));
  CHECK(r.nu == doctest::Approx(0.70).epsilon(0.07));
  CHECK_FALSE(r.non_critical);
  CHECK(r.cost < 0.1 * r.unscaled_cost);
  CHECK(r.bootstrap_samples == 10);
  CHECK_FALSE(r.resampled_realizations);
}

TEST_CASE("identical curves are flagged non-critical") {
  ScalingDataset d;
  for (int l : {8, 10, 12}) {
    for (int i = 0; i <= 20; ++i) {
      const double k = 0.05 * i;
      d.points.push_back({1.0, k, l, {std::tanh(3 * (k - 0.5))}});
    }
  }
  CollapseOptions opt;
  opt.bootstrap = 0;
  CHECK(collapse(d, opt).non_critical);
}

TEST_CASE("collapse cost invariances") {
  const ScalingDataset d = planted(0.4, 0.7);
  ScalingDataset shuffled = d;
  std::reverse(shuffled.points.begin(), shuffled.points.end());
  ScalingDataset affine = d;
  for (auto& p : affine.points) p.samples[0] = 3.0 * p.samples[0] - 1.0;
  for (double kc : {0.3, 0.4, 0.5}) {
    for (double nu : {0.5, 0.7, 1.0}) {
      const double c = collapse_cost(d, kc, nu);
      CHECK(collapse_cost(shuffled, kc, nu) == doctest::Approx(c));
      CHECK(collapse_cost(affine, kc, nu) == doctest::Approx(9.0 * c));
    }
  }
}

TEST_CASE("bootstrap resamples realizations when available") {
  ScalingDataset d = planted(0.4, 0.7, 3);
  for (auto& p : d.points) {
    p.samples[1] += 0.01;
    p.samples[2] -= 0.01;
  }
  CollapseOptions opt;
  opt.bootstrap = 5;
  opt.seed = 9;
  const CollapseResult a = collapse(d, opt);
  const CollapseResult b = collapse(d, opt);
  CHECK(a.resampled_realizations);
  CHECK(a.bootstrap_kicks == b.bootstrap_kicks);
  CHECK(a.bootstrap_nus == b.bootstrap_nus);
}

TEST_CASE("dataset validation") {
  ScalingDataset two;
  for (int l : {8, 10}) {
    two.points.push_back({1.0, 0.1, l, {0.1}});
    two.points.push_back({1.0, 0.2, l, {0.2}});
  }
  CHECK_THROWS_AS(collapse(two), ConfigError);
  ScalingDataset mixed = planted(0.4, 0.7);
  mixed.points.push_back({2.0, 0.1, 8, {0.0}});
  CHECK_THROWS_AS(collapse(mixed), ConfigError);
  CHECK_NOTHROW(mixed.at_coupling(1.0).validate());
  CHECK(mixed.couplings().size() == 2);
}

TEST_CASE("collapsed curve") {
  const auto pts = collapsed_curve(planted(0.4, 0.7), 0.4, 0.7);
  REQUIRE(pts.size() == 63);
  for (const auto& p : pts) CHECK(p.value == doctest::Approx(master(p.scaled)));
}

TEST_CASE("boundary of an analytic field") {
  ParameterGrid g;
  for (int i = 0; i <= 40; ++i) g.kicks.push_back(0.05 + 0.05 * i);
  for (int r = 0; r <= 7; ++r) g.couplings.push_back(0.25 + 0.25 * r);
  g.values.resize(8, 41);
  for (int r = 0; r <= 7; ++r)
    for (int c = 0; c <= 40; ++c)
      g.values(r, c) = g.kicks[c] / (g.kicks[c] + g.couplings[r]);
  const auto line = boundary_trace(g, 0.5);
  REQUIRE(line.size() == 8);
  for (const auto& p : line) CHECK(p.kick == doctest::Approx(p.coupling).epsilon(0.01));
  for (std::size_t i = 1; i < line.size(); ++i) CHECK(line[i].kick > line[i - 1].kick);
}

TEST_CASE("boundary of a constant field is empty") {
  ParameterGrid g{{0.1, 0.2, 0.3}, {1.0, 2.0}, Eigen::MatrixXd::Constant(2, 3, 0.3)};
  CHECK(boundary_trace(g, 0.009).empty());
  CHECK(boundary_trace(g, 0.3).empty());
  ParameterGrid bad{{0.1, 0.2}, {1.0}, Eigen::MatrixXd::Zero(2, 2)};
  CHECK_THROWS_AS(boundary_trace(bad), ConfigError);
}

}  // TEST_SUITE
