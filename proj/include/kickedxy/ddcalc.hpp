#pragma once

#include "kickedxy/dynamics.hpp"

#include <numbers>
#include <string>
#include <vector>

namespace kxy {

// Dynamical decoupling by the quadratic kick. Site j decouples when its
// kick phase K T (j - j0)^2 is a positive multiple of pi: the local Floquet
// operator is then (-1)^m exp(-i Omega T sigma^x_j), a free Rabi rotation.

inline constexpr double kExactPhaseTolerance = 1e-9 * std::numbers::pi;
inline constexpr double kCoarsePhaseTolerance = 0.02 * std::numbers::pi;

/// K_d^(j,m) = m pi / (T (j - j0)^2). Throws ConfigError at j = j0.
double kick_for_site(const ChainConfig& config, int site, int multiple = 1);

/// Sites whose kick phase K T (j - j0)^2 lies within phase_tol of m pi, m >= 1.
std::vector<int> decoupled_sites(const ChainConfig& config, double kick,
                                 double phase_tol = kExactPhaseTolerance);

/// K(N_d, L) = pi / (T floor((L - 1) / N_d)^2), 1 <= N_d <= L - 1.
double kick_for_count(int sites, int count, double period = 1.0 / 16.0);

/// omega_d = Omega T / pi in cycles per kick.
double rabi_frequency(const ChainConfig& config);

struct DDPlanEntry {
  int spacing = 0;         // l
  int outer_distance = 0;  // j_l = l floor((L - 1) / (2 l))
  int count = 0;           // N_d^(l) = 2 floor((L - 1) / (2 l))
  double kick = 0.0;       // pi / (T l^2): phase pi at distance l
  std::vector<int> sites;  // decoupled_sites at that kick
  /// Largest l for its N_d, i.e. the weakest kick reaching that count.
  /// Exactly these rows coincide with kick_for_count(L, N_d).
  bool representative = false;
};

struct DDPlan {
  int sites = 0;
  double period = 0.0;
  double rabi = 0.0;
  std::vector<DDPlanEntry> entries;  // l = 1 .. floor((L - 1) / 2)

  /// One entry per distinct N_d, ordered by l.
  std::vector<DDPlanEntry> representatives() const;
};

/// Iterates the spacing l from 1 and lists the decoupled set of each.
DDPlan enumerate_dd_plan(int sites, double period = 1.0 / 16.0,
                         double field = 1.0);

struct SiteCheck {
  int site = 0;
  double max_deviation = 0.0;  // max_n |P_up(j, n) - free spin|
  double peak_frequency = 0.0;
  double peak_offset = 0.0;    // peak_frequency - omega_d
  bool passed = false;
};

struct DDReport {
  ChainConfig config;
  double rabi = 0.0;
  double resolution = 0.0;     // padded frequency spacing used for the peak test
  double pattern_memory = 0.0; // late-time overlap of <sigma^z> with its start
  bool delocalized = false;
  bool passed = false;
  std::vector<SiteCheck> sites;
  std::string warning;
};

struct DDVerifyOptions {
  double deviation_limit = 0.1;
  /// Below this, the bulk has forgotten its initial z pattern and the run
  /// is flagged as delocalized.
  double memory_threshold = 0.1;
  DynamicsOptions dynamics;
};

/// Evolves a product state with config (K included) for `horizon` kicks and
/// checks every claimed site against the free Rabi rotation.
DDReport verify_dd(const ChainConfig& config, const std::vector<int>& sites,
                   int horizon, const ProductSpec& initial,
                   const DDVerifyOptions& options = {});

/// Same check on an existing trajectory.
DDReport verify_dd(const TimeSeries& series, const std::vector<int>& sites,
                   const ProductSpec& initial,
                   const DDVerifyOptions& options = {});

}  // namespace kxy
