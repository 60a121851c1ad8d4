// End-to-end acceptance checks. Each criterion prints one line:
//   PASS <name> (<seconds> s): <measured values>
//   FAIL <name> (<seconds> s): <measured values>
// Usage: kxy_acceptance [name ...]   (no names runs all of them)
#include "kickedxy/ddcalc.hpp"
#include "kickedxy/dynamics.hpp"
#include "kickedxy/scaling.hpp"
#include "kickedxy/spectral.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace kxy;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

ChainConfig chain(int sites, double j, double k) {
  ChainConfig c;
  c.sites = sites;
  c.coupling = j;
  c.kick = k;
  return c;
}

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Peak-to-peak of P_up(site) over snapshots with kick >= from.
double swing(const TimeSeries& ts, int site, int from) {
  double lo = 1.0, hi = 0.0;
  for (Index s = 0; s < ts.size(); ++s) {
    if (ts.kicks[static_cast<std::size_t>(s)] < from) continue;
    lo = std::min(lo, ts.up_probability(s, site - 1));
    hi = std::max(hi, ts.up_probability(s, site - 1));
  }
  return hi - lo;
}

Outcome gap_ratio_endpoints() {
  const GapRatioResult mbdl = mean_gap_ratio(chain(12, 2.0, 2.0), 20, 0.02, 2024);
  const GapRatioResult deloc = mean_gap_ratio(chain(12, 2.0, 0.2), 20, 0.02, 2024);
  const bool pass = std::abs(mbdl.mean - 0.386) <= 0.02 && std::abs(deloc.mean - 0.53) <= 0.02;
  return {pass, fmt("r(J=2,K=2) = %.4f [0.386 +- 0.02], r(J=2,K=0.2) = %.4f [0.53 +- 0.02]",
                    mbdl.mean, deloc.mean)};
}

Outcome dd_frequency() {
  const ChainConfig c = chain(11, 1.0, 16 * kPi / 25);
  const TimeSeries ts = run_dynamics(c, make_product_state(ProductSpec::neel(11)), {2048, 1});
  const SpectrumEstimate s = edge_spin_spectrum(ts, 1);
  const double target = rabi_frequency(c);
  const double offset = s.peak_frequency - target;
  return {std::abs(offset) <= s.resolution,
          fmt("peak %.7f vs 1/(16 pi) = %.7f, offset %.2e = %.2f interpolated bins",
              s.peak_frequency, target, offset, offset / s.resolution)};
}

Outcome dd_kick_formula() {
  constexpr double step = 0.02;
  bool pass = true;
  std::string detail;
  for (int l : {7, 9, 11}) {
    const double formula = 4 * kPi / ((1.0 / 16.0) * (l - 1) * (l - 1));
    const double centre = step * std::round(formula / step);
    double best_k = 0.0, best = -1.0;
    for (int i = -8; i <= 8; ++i) {
      const double k = centre + step * i;
      const TimeSeries ts =
          run_dynamics(chain(l, 1.0, k), make_product_state(ProductSpec::neel(l)), {1024, 1});
      const double a = swing(ts, 1, 512);
      if (a > best) {
        best = a;
        best_k = k;
      }
    }
    const bool ok = std::abs(best_k - formula) <= step + 1e-12;
    pass = pass && ok;
    detail += fmt("%sL=%d: best K %.2f (swing %.3f) vs %.4f", detail.empty() ? "" : "; ", l,
                  best_k, best, formula);
  }
  return {pass, detail};
}

Outcome dd_plan_consistency() {
  bool exact = true;
  int pairs = 0;
  for (int l : {21, 41, 61}) {
    for (const DDPlanEntry& e : enumerate_dd_plan(l).representatives()) {
      const double spacing = std::floor(double(l - 1) / e.count);
      const double expected = kPi / ((1.0 / 16.0) * spacing * spacing);
      exact = exact && e.kick == expected;
      ++pairs;
    }
  }
  const ChainConfig c = chain(21, 1.0, 16 * kPi / 25);
  const TimeSeries ts = run_dynamics(c, make_product_state(ProductSpec::neel(21)), {512, 1});
  std::vector<int> oscillating;
  double interior_max = 0.0;
  const std::vector<int> expected_sites = decoupled_sites(c, c.kick);
  for (int j = 1; j <= 21; ++j) {
    const double a = swing(ts, j, 0);
    if (a > 0.8) oscillating.push_back(j);
    if (std::find(expected_sites.begin(), expected_sites.end(), j) == expected_sites.end()) {
      interior_max = std::max(interior_max, a);
    }
  }
  std::string sites;
  for (int j : oscillating) sites += (sites.empty() ? "" : ",") + std::to_string(j);
  const bool pass = exact && oscillating == expected_sites && oscillating.size() == 4;
  return {pass, fmt("%d (N_d, K) pairs %s; L=21 sites with amplitude > 0.8: {%s}, "
                    "largest other amplitude %.3f",
                    pairs, exact ? "exact" : "NOT exact", sites.c_str(), interior_max)};
}

Outcome imbalance_separation() {
  const StateVector neel = make_product_state(ProductSpec::neel(13));
  const double mbdl = time_averaged_imbalance(run_dynamics(chain(13, 0.5, 0.5), neel, {200, 1}));
  const double deloc = time_averaged_imbalance(run_dynamics(chain(13, 2.5, 0.5), neel, {200, 1}));
  return {mbdl - deloc >= 0.3,
          fmt("I(J=0.5) = %.4f, I(J=2.5) = %.4f, difference %.4f [>= 0.3]", mbdl, deloc,
              mbdl - deloc)};
}

Outcome entanglement_laws() {
  std::vector<double> ls, mbdl, deloc;
  for (int l : {8, 10, 12}) {
    const StateVector neel = make_product_state(ProductSpec::neel(l));
    ls.push_back(l);
    mbdl.push_back(saturation_entropy(run_dynamics(chain(l, 0.5, 0.5), neel, {600, 1}, l / 2)));
    deloc.push_back(saturation_entropy(run_dynamics(chain(l, 2.5, 0.5), neel, {600, 1}, l / 2)));
  }
  const double s_mbdl = slope(ls, mbdl);
  const double s_deloc = slope(ls, deloc);
  // Deep delocalized eigenstates: J = 2 with a vanishing kick.
  const FloquetSpectrum spec =
      diagonalize_floquet(build_floquet(chain(10, 2.0, 0.05), {Propagation::dense}));
  const double sf = mean_half_chain_entropy(spec);
  const double page = (10 * std::log(2.0) - 1) / 2;
  const double rel = std::abs(sf - page) / page;
  const bool pass = std::abs(s_mbdl) < 0.05 && s_deloc > 0.15 && rel <= 0.10;
  return {pass, fmt("slope MBDL %.4f [|.| < 0.05], slope delocalized %.4f [> 0.15], "
                    "S_F(L=10, J=2, K=0.05) = %.4f vs Page %.4f (%.1f%%)",
                    s_mbdl, s_deloc, sf, page, 100 * rel)};
}

Outcome finite_size_scaling() {
  // A centred kick on an even chain makes O_F vanish by reflection symmetry,
  // so every point averages over small random kick-centre offsets.
  const std::vector<double> offsets = draw_center_offsets(4, 0.02, 2024);
  ScalingDataset data;
  for (int l : {8, 10, 12}) {
    const StateVector neel = make_product_state(ProductSpec::neel(l));
    ChainConfig c = chain(l, 1.0, 0.0);
    const auto w = build_static_propagator(c);
    for (int i = 1; i <= 20; ++i) {
      c.kick = 0.05 * i;
      std::vector<double> samples;
      for (double offset : offsets) {
        c.center_offset = offset;
        const FloquetSpectrum s = diagonalize_floquet(build_floquet(c, {Propagation::dense, {}, w}));
        samples.push_back(diagonal_ensemble_staggered_mag(s, neel));
      }
      data.points.push_back({1.0, c.kick, l, samples});
    }
  }
  CollapseOptions opt;
  opt.bootstrap = 100;
  const CollapseResult r = collapse(data, opt);
  const bool pass = std::abs(r.critical_kick - 0.38) <= 0.10 && r.nu >= 0.5 && r.nu <= 0.9 &&
                    !r.non_critical;
  return {pass, fmt("K_c = %.3f +- %.3f [0.38 +- 0.10], nu = %.3f +- %.3f [0.5, 0.9]%s",
                    r.critical_kick, r.critical_kick_error, r.nu, r.nu_error,
                    r.non_critical ? ", flagged non-critical" : "")};
}

Outcome beta_eff() {
  const ChainConfig c = chain(11, 0.5, 1.0);
  const FloquetSpectrum s = diagonalize_floquet(build_floquet(c, {Propagation::dense}));
  // epsilon_p of every product state at once: |<p|alpha>|^2 weighted quasi-energies.
  const Eigen::VectorXd eps_p = s.eigenvectors().cwiseAbs2() * s.quasienergies;
  const double centre = s.quasienergies.mean();
  Index best = 0;
  (eps_p.array() - centre).abs().minCoeff(&best);
  StateVector psi{c.sites, Eigen::VectorXcd::Zero(s.dimension())};
  psi.amplitudes(best) = 1.0;
  const ThermalFit fit = effective_inverse_temperature(s, psi);
  const bool pass = std::abs(fit.beta) < 0.1 && fit.residual < 1e-8 && !fit.saturated;
  return {pass, fmt("state %ld with eps_p = %.4f (spectral mean %.4f): beta_eff = %.2e, "
                    "residual %.1e",
                    static_cast<long>(best), fit.target_energy, centre, fit.beta, fit.residual)};
}

Outcome lifetime_monotonicity() {
  // Horizons double until the envelope shows its first trough. The largest
  // chain only has to outlive the previous one: an envelope without a trough
  // inside the horizon is the lower bound tau >= horizon.
  constexpr int kFirstHorizon = 20000;
  constexpr int kMaxHorizon = 640000;
  const std::vector<int> sizes{7, 9, 11};
  std::vector<LifetimeEstimate> est;
  std::string detail;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const int l = sizes[i];
    ChainConfig c = chain(l, 1.0, 0.0);
    c.kick = kick_for_site(c, 1, 1);
    const bool last = i + 1 == sizes.size();
    int horizon = last ? std::max(kFirstHorizon, static_cast<int>(1.1 * est.back().tau) + 1)
                       : kFirstHorizon;
    LifetimeEstimate e;
    for (;;) {
      const TimeSeries ts =
          run_dynamics(c, make_product_state(ProductSpec::vacuum(l)), {horizon, 1});
      e = lifetime(ts);
      if (!e.open_ended || last || 2 * horizon > kMaxHorizon) break;
      horizon *= 2;
    }
    est.push_back(e);
    detail += fmt("%stau(%d) %s %.0f", detail.empty() ? "" : ", ", l,
                  e.open_ended ? ">=" : "=", e.tau);
  }
  bool pass = true;
  for (std::size_t i = 1; i < est.size(); ++i) {
    // A censored earlier value cannot be ordered against a later one.
    pass = pass && !est[i - 1].open_ended && est[i].tau > est[i - 1].tau;
  }
  return {pass, detail};
}

Outcome property_suites() {
#ifdef KXY_PROPERTY_BINARY
  const std::string cmd = std::string("\"") + KXY_PROPERTY_BINARY + "\" --no-intro=true --minimal=true";
  const int status = std::system(cmd.c_str());
  return {status == 0, fmt("standalone property binary exit status %d", status)};
#else
  return {false, "property binary path not configured"};
#endif
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"gap_ratio_endpoints", gap_ratio_endpoints},
      {"dd_frequency", dd_frequency},
      {"dd_kick_formula", dd_kick_formula},
      {"dd_plan_consistency", dd_plan_consistency},
      {"imbalance_separation", imbalance_separation},
      {"entanglement_laws", entanglement_laws},
      {"finite_size_scaling", finite_size_scaling},
      {"beta_eff", beta_eff},
      {"lifetime_monotonicity", lifetime_monotonicity},
      {"property_suites", property_suites},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted(argv + 1, argv + argc);
  for (const auto& w : wanted) {
    if (std::none_of(criteria().begin(), criteria().end(),
                     [&](const Criterion& c) { return w == c.name; })) {
      std::cerr << "unknown criterion '" << w << "'\n";
      return 2;
    }
  }
  int failures = 0;
  for (const Criterion& c : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.name) == wanted.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << " (" << fmt("%.1f", secs)
              << " s): " << o.detail << std::endl;
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
