#include "kickedxy/ddcalc.hpp"

#include <cmath>
#include <algorithm>

namespace kxy {

double kick_for_site(const ChainConfig& config, int site, int multiple) {
  if (site < 1 || site > config.sites) throw ConfigError("site out of range");
  if (multiple < 1) throw ConfigError("multiple m must be positive");
  if (!(config.period > 0.0)) throw ConfigError("T must be positive");
  const double d = site - config.center();
  if (std::abs(d) < 1e-12) {
    throw ConfigError("site " + std::to_string(site) +
                      " sits at the kick center and never decouples");
  }
  return multiple * std::numbers::pi / (config.period * d * d);
}

std::vector<int> decoupled_sites(const ChainConfig& config, double kick,
                                 double phase_tol) {
  std::vector<int> out;
  if (!(kick > 0.0)) return out;
  for (int j = 1; j <= config.sites; ++j) {
    const double d = j - config.center();
    const double phase = kick * config.period * d * d;
    const double m = std::round(phase / std::numbers::pi);
    if (m >= 1.0 && std::abs(phase - m * std::numbers::pi) <= phase_tol) {
      out.push_back(j);
    }
  }
  return out;
}

double kick_for_count(int sites, int count, double period) {
  if (sites < 2) throw ConfigError("L must be at least 2");
  if (count < 1 || count > sites - 1) {
    throw ConfigError("N_d = " + std::to_string(count) +
                      " outside 1..L-1 = " + std::to_string(sites - 1));
  }
  if (!(period > 0.0)) throw ConfigError("T must be positive");
  const int spacing = (sites - 1) / count;
  return std::numbers::pi / (period * spacing * spacing);
}

double rabi_frequency(const ChainConfig& config) {
  return config.field * config.period / std::numbers::pi;
}

std::vector<DDPlanEntry> DDPlan::representatives() const {
  std::vector<DDPlanEntry> out;
  for (const DDPlanEntry& e : entries) {
    if (e.representative) out.push_back(e);
  }
  return out;
}

DDPlan enumerate_dd_plan(int sites, double period, double field) {
  // Pure arithmetic: no state vector, so no cap on L.
  if (sites < 2) throw ConfigError("L must be at least 2");
  if (!(period > 0.0)) throw ConfigError("T must be positive");
  ChainConfig config;
  config.sites = sites;
  config.period = period;
  config.field = field;
  config.coupling = 0.0;

  DDPlan plan;
  plan.sites = sites;
  plan.period = period;
  plan.rabi = rabi_frequency(config);
  const int half = (sites - 1) / 2;
  for (int l = 1; l <= half; ++l) {
    DDPlanEntry e;
    e.spacing = l;
    e.count = 2 * ((sites - 1) / (2 * l));
    e.outer_distance = l * ((sites - 1) / (2 * l));
    e.kick = std::numbers::pi / (period * l * l);
    e.sites = decoupled_sites(config, e.kick);
    plan.entries.push_back(std::move(e));
  }
  // The last l with a given count is the weakest kick reaching it.
  for (std::size_t i = 0; i < plan.entries.size(); ++i) {
    plan.entries[i].representative =
        i + 1 == plan.entries.size() ||
        plan.entries[i + 1].count != plan.entries[i].count;
  }
  return plan;
}

namespace {

double free_spin_up_probability(bool starts_up, double omega_t, int n) {
  const double c = std::cos(omega_t * n);
  return starts_up ? c * c : 1.0 - c * c;
}

}  // namespace

DDReport verify_dd(const TimeSeries& series, const std::vector<int>& sites,
                   const ProductSpec& initial, const DDVerifyOptions& options) {
  const ChainConfig& config = series.config;
  if (initial.sites() != config.sites) {
    throw ConfigError("initial pattern does not match L");
  }
  DDReport report;
  report.config = config;
  report.rabi = rabi_frequency(config);
  const double omega_t = config.field * config.period;

  for (int j : sites) {
    if (j < 1 || j > config.sites) throw ConfigError("site out of range");
    const bool up = initial.pattern[static_cast<std::size_t>(j - 1)] == Spin::up;
    SiteCheck check;
    check.site = j;
    for (Index s = 0; s < series.size(); ++s) {
      const double expected =
          free_spin_up_probability(up, omega_t, series.kicks[static_cast<std::size_t>(s)]);
      check.max_deviation = std::max(
          check.max_deviation, std::abs(series.up_probability(s, j - 1) - expected));
    }
    const SpectrumEstimate spectrum = edge_spin_spectrum(series, j);
    report.resolution = spectrum.resolution;
    check.peak_frequency = spectrum.peak_frequency;
    check.peak_offset = spectrum.peak_frequency - report.rabi;
    check.passed = std::abs(check.peak_offset) <= spectrum.resolution &&
                   check.max_deviation < options.deviation_limit;
    report.sites.push_back(check);
  }

  // Memory of the initial z pattern in the bulk over the second half.
  std::vector<int> bulk;
  for (int j = 1; j <= config.sites; ++j) {
    if (std::find(sites.begin(), sites.end(), j) == sites.end()) bulk.push_back(j);
  }
  if (!bulk.empty() && series.size() > 1) {
    double memory = 0.0;
    int samples = 0;
    for (Index s = series.size() / 2; s < series.size(); ++s) {
      double overlap = 0.0;
      for (int j : bulk) {
        const double s0 =
            initial.pattern[static_cast<std::size_t>(j - 1)] == Spin::up ? 1.0 : -1.0;
        overlap += s0 * (2.0 * series.up_probability(s, j - 1) - 1.0);
      }
      memory += overlap / static_cast<double>(bulk.size());
      ++samples;
    }
    report.pattern_memory = memory / samples;
    report.delocalized = report.pattern_memory < options.memory_threshold;
  }
  if (report.delocalized) {
    report.warning =
        "bulk z pattern decayed (memory " + std::to_string(report.pattern_memory) +
        "): delocalized regime, decoupling is not protected";
  }
  report.passed = !report.sites.empty() && !report.delocalized &&
                  std::all_of(report.sites.begin(), report.sites.end(),
                              [](const SiteCheck& c) { return c.passed; });
  return report;
}

DDReport verify_dd(const ChainConfig& config, const std::vector<int>& sites,
                   int horizon, const ProductSpec& initial,
                   const DDVerifyOptions& options) {
  const StateVector psi0 = make_product_state(initial, config.sites);
  const TimeSeries series =
      run_dynamics(config, psi0, EvolutionSchedule{horizon, 1}, 0, options.dynamics);
  return verify_dd(series, sites, initial, options);
}

}  // namespace kxy
