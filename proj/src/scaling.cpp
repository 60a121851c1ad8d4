#include "kickedxy/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace kxy {

std::string to_string(ScalingObservable observable) {
  return observable == ScalingObservable::staggered ? "O_F" : "S_F/L";
}

ScalingObservable parse_observable(const std::string& text) {
  if (text == "O_F" || text == "staggered" || text == "O") {
    return ScalingObservable::staggered;
  }
  if (text == "S_F/L" || text == "S_F" || text == "entropy" || text == "S") {
    return ScalingObservable::entropy_density;
  }
  throw ConfigError("unknown scaling observable '" + text + "'");
}

double ScalingPoint::mean() const {
  if (samples.empty()) throw ConfigError("scaling point without samples");
  return std::accumulate(samples.begin(), samples.end(), 0.0) /
         static_cast<double>(samples.size());
}

std::vector<int> ScalingDataset::sizes() const {
  std::set<int> s;
  for (const auto& p : points) s.insert(p.sites);
  return {s.begin(), s.end()};
}

std::vector<double> ScalingDataset::kicks() const {
  std::set<double> s;
  for (const auto& p : points) s.insert(p.kick);
  return {s.begin(), s.end()};
}

std::vector<double> ScalingDataset::couplings() const {
  std::set<double> s;
  for (const auto& p : points) s.insert(p.coupling);
  return {s.begin(), s.end()};
}

ScalingDataset ScalingDataset::at_coupling(double coupling) const {
  ScalingDataset out;
  out.observable = observable;
  for (const auto& p : points) {
    if (p.coupling == coupling) out.points.push_back(p);
  }
  return out;
}

void ScalingDataset::validate() const {
  const std::vector<int> ls = sizes();
  if (ls.size() < 3) {
    throw ConfigError("collapse needs at least 3 system sizes, got " +
                      std::to_string(ls.size()));
  }
  if (couplings().size() != 1) {
    throw ConfigError("collapse expects a single J; select one with at_coupling");
  }
  for (int l : ls) {
    std::vector<double> ks;
    for (const auto& p : points) {
      if (p.sites != l) continue;
      if (p.samples.empty()) throw ConfigError("scaling point without samples");
      ks.push_back(p.kick);
    }
    std::sort(ks.begin(), ks.end());
    if (ks.size() < 2 || std::adjacent_find(ks.begin(), ks.end()) != ks.end()) {
      throw ConfigError("K grid of L = " + std::to_string(l) +
                        " must hold at least two distinct values");
    }
  }
}

namespace {

struct Sample {
  double x;
  double y;
  int sites;
};

double pooled_cost(const std::vector<Sample>& pts, double bandwidth_factor) {
  const std::size_t n = pts.size();
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = pts[i].x;
  std::sort(xs.begin(), xs.end());
  std::vector<double> gaps;
  for (std::size_t i = 1; i < n; ++i) {
    if (xs[i] > xs[i - 1]) gaps.push_back(xs[i] - xs[i - 1]);
  }
  if (gaps.empty()) return std::numeric_limits<double>::infinity();
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  const double h = bandwidth_factor * gaps[gaps.size() / 2];

  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double s0 = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (pts[j].sites == pts[i].sites) continue;
      const double dx = pts[j].x - pts[i].x;
      if (std::abs(dx) > h) continue;
      s0 += 1;
      sx += dx;
      sy += pts[j].y;
      sxx += dx * dx;
      sxy += dx * pts[j].y;
    }
    if (s0 < 2) continue;
    // Fit y = a + b dx around x_i; the prediction at x_i is a.
    const double det = s0 * sxx - sx * sx;
    double predicted;
    if (det > 1e-12 * std::max(1.0, s0 * sxx)) {
      predicted = (sxx * sy - sx * sxy) / det;
    } else {
      predicted = sy / s0;
    }
    const double r = pts[i].y - predicted;
    total += r * r;
    ++counted;
  }
  // Candidates that pull the sizes apart leave too little overlap to judge.
  if (2 * counted < n) return std::numeric_limits<double>::infinity();
  return total / static_cast<double>(counted);
}

// inv_nu = 0 leaves the abscissa unscaled.
std::vector<Sample> rescale(const std::vector<Sample>& base,
                            const std::vector<double>& kicks, double kc,
                            double inv_nu) {
  std::vector<Sample> out = base;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].x = (kicks[i] - kc) * std::pow(static_cast<double>(out[i].sites), inv_nu);
  }
  return out;
}

struct Prepared {
  std::vector<Sample> samples;
  std::vector<double> kicks;
};

Prepared prepare(const ScalingDataset& data) {
  Prepared p;
  for (const auto& pt : data.points) {
    p.samples.push_back({pt.kick, pt.mean(), pt.sites});
    p.kicks.push_back(pt.kick);
  }
  return p;
}

struct GridBest {
  double kc = 0.0;
  double nu = 0.0;
  double cost = std::numeric_limits<double>::infinity();
};

GridBest grid_search(const Prepared& p, const std::vector<double>& kcs,
                     const std::vector<double>& nus, double bandwidth_factor) {
  GridBest best;
  for (double nu : nus) {
    for (double kc : kcs) {
      const double c =
          pooled_cost(rescale(p.samples, p.kicks, kc, 1.0 / nu), bandwidth_factor);
      if (c < best.cost) best = {kc, nu, c};
    }
  }
  return best;
}

std::vector<double> refined_kick_grid(const std::vector<double>& ks) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
    for (int s = 0; s < 4; ++s) out.push_back(ks[i] + s * (ks[i + 1] - ks[i]) / 4.0);
  }
  out.push_back(ks.back());
  return out;
}

std::vector<double> default_nu_grid() {
  std::vector<double> out;
  for (int i = 30; i <= 120; ++i) out.push_back(i / 100.0);
  return out;
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

}  // namespace

double collapse_cost(const ScalingDataset& data, double critical_kick, double nu,
                     double bandwidth_factor) {
  if (!(nu > 0.0)) throw ConfigError("nu must be positive");
  const Prepared p = prepare(data);
  return pooled_cost(rescale(p.samples, p.kicks, critical_kick, 1.0 / nu),
                     bandwidth_factor);
}

CollapseResult collapse(const ScalingDataset& data, const CollapseOptions& options) {
  data.validate();
  const std::vector<double> kcs = options.critical_kicks.empty()
                                      ? refined_kick_grid(data.kicks())
                                      : options.critical_kicks;
  const std::vector<double> nus =
      options.nus.empty() ? default_nu_grid() : options.nus;
  if (kcs.empty() || nus.empty()) throw ConfigError("empty collapse grid");
  if (std::any_of(nus.begin(), nus.end(), [](double v) { return !(v > 0.0); })) {
    throw ConfigError("nu grid must be positive");
  }

  const Prepared p = prepare(data);
  GridBest best = grid_search(p, kcs, nus, options.bandwidth_factor);
  if (!std::isfinite(best.cost)) {
    throw NumericError("collapse: no candidate leaves enough overlap between sizes");
  }

  CollapseResult result;
  const auto [kmin, kmax] = std::minmax_element(kcs.begin(), kcs.end());
  const auto [nmin, nmax] = std::minmax_element(nus.begin(), nus.end());
  const bool nu_edge = best.nu == *nmin || best.nu == *nmax;
  const bool kc_edge = best.kc == *kmin || best.kc == *kmax;

  // Local refinement on a 5x finer grid around the coarse minimizer.
  const double dk = kcs.size() > 1 ? (*kmax - *kmin) / (kcs.size() - 1) : 0.0;
  const double dn = nus.size() > 1 ? (*nmax - *nmin) / (nus.size() - 1) : 0.0;
  std::vector<double> fine_k, fine_n;
  for (int s = -5; s <= 5; ++s) {
    const double k = best.kc + s * dk / 5.0;
    if (k >= *kmin && k <= *kmax) fine_k.push_back(k);
    const double v = best.nu + s * dn / 5.0;
    if (v >= *nmin && v <= *nmax && v > 0.0) fine_n.push_back(v);
  }
  const GridBest fine = grid_search(p, fine_k, fine_n, options.bandwidth_factor);
  if (fine.cost <= best.cost) best = fine;

  result.critical_kick = best.kc;
  result.nu = best.nu;
  result.cost = best.cost;
  result.unscaled_cost =
      pooled_cost(rescale(p.samples, p.kicks, 0.0, 0.0), options.bandwidth_factor);
  result.non_critical = nu_edge || kc_edge ||
                        !(best.cost < options.critical_gain * result.unscaled_cost);

  if (options.bootstrap > 0) {
    std::mt19937_64 rng(options.seed);
    result.resampled_realizations =
        std::all_of(data.points.begin(), data.points.end(),
                    [](const ScalingPoint& pt) { return pt.samples.size() >= 2; });
    for (int b = 0; b < options.bootstrap; ++b) {
      ScalingDataset draw;
      draw.observable = data.observable;
      if (result.resampled_realizations) {
        for (const auto& pt : data.points) {
          ScalingPoint q = pt;
          std::uniform_int_distribution<std::size_t> pick(0, pt.samples.size() - 1);
          for (auto& s : q.samples) s = pt.samples[pick(rng)];
          draw.points.push_back(std::move(q));
        }
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, data.points.size() - 1);
        for (std::size_t i = 0; i < data.points.size(); ++i) {
          draw.points.push_back(data.points[pick(rng)]);
        }
      }
      const GridBest g = grid_search(prepare(draw), kcs, nus, options.bandwidth_factor);
      if (!std::isfinite(g.cost)) continue;
      result.bootstrap_kicks.push_back(g.kc);
      result.bootstrap_nus.push_back(g.nu);
    }
    result.bootstrap_samples = static_cast<int>(result.bootstrap_kicks.size());
    result.critical_kick_error = stddev(result.bootstrap_kicks);
    result.nu_error = stddev(result.bootstrap_nus);
  }
  return result;
}

std::vector<CollapsedPoint> collapsed_curve(const ScalingDataset& data,
                                            double critical_kick, double nu) {
  if (!(nu > 0.0)) throw ConfigError("nu must be positive");
  std::vector<CollapsedPoint> out;
  for (const auto& pt : data.points) {
    out.push_back({pt.sites, pt.kick,
                   (pt.kick - critical_kick) * std::pow(double(pt.sites), 1.0 / nu),
                   pt.mean()});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.sites != b.sites ? a.sites < b.sites : a.kick < b.kick;
  });
  return out;
}

std::vector<BoundaryPoint> boundary_trace(const ParameterGrid& grid, double level) {
  const Index rows = grid.values.rows();
  const Index cols = grid.values.cols();
  if (rows != static_cast<Index>(grid.couplings.size()) ||
      cols != static_cast<Index>(grid.kicks.size())) {
    throw ConfigError("boundary grid dimensions do not match its axes");
  }
  std::vector<BoundaryPoint> out;
  if (rows == 0 || cols < 2) return out;
  if (level < grid.values.minCoeff() || level > grid.values.maxCoeff()) return out;
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c + 1 < cols; ++c) {
      const double v0 = grid.values(r, c);
      const double v1 = grid.values(r, c + 1);
      if ((v0 - level) * (v1 - level) > 0.0 || v0 == v1) continue;
      const double k0 = grid.kicks[static_cast<std::size_t>(c)];
      const double k1 = grid.kicks[static_cast<std::size_t>(c + 1)];
      out.push_back({k0 + (level - v0) / (v1 - v0) * (k1 - k0),
                     grid.couplings[static_cast<std::size_t>(r)]});
      break;
    }
  }
  return out;
}

}  // namespace kxy
