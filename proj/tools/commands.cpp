#include "commands.hpp"

#include "artifacts.hpp"
#include "states.hpp"
#include "worker_pool.hpp"

#include "kickedxy/ddcalc.hpp"
#include "kickedxy/dynamics.hpp"
#include "kickedxy/spectral.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace kxy::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

nlohmann::json config_json(const ChainConfig& config) {
  return nlohmann::json::parse(config_to_json(config));
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("invalid number '" + text + "' in " + what);
  }
  if (used != text.size()) throw ConfigError("invalid number '" + text + "' in " + what);
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::string join_sites(const std::vector<int>& sites) {
  std::string s;
  for (std::size_t i = 0; i < sites.size(); ++i) s += (i ? " " : "") + std::to_string(sites[i]);
  return s;
}

}  // namespace

ChainConfig ChainOverrides::resolve() const {
  ChainConfig c = file ? load_config(*file) : ChainConfig{};
  if (sites) c.sites = *sites;
  if (coupling) c.coupling = *coupling;
  if (field) c.field = *field;
  if (kick) c.kick = *kick;
  if (period) c.period = *period;
  if (center_offset) c.center_offset = *center_offset;
  c.validate();
  return c;
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("grid '" + text + "' is not start:stop:count");
    const double start = parse_double(parts[0], "grid");
    const double stop = parse_double(parts[1], "grid");
    const double count = parse_double(parts[2], "grid");
    if (count < 1 || count != std::floor(count)) {
      throw ConfigError("grid count must be a positive integer");
    }
    const int n = static_cast<int>(count);
    if (n == 1 && start != stop) throw ConfigError("a one-point grid needs start = stop");
    std::vector<double> values(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      values[static_cast<std::size_t>(i)] = n == 1 ? start : start + (stop - start) * i / (n - 1);
    }
    return values;
  }
  std::vector<double> values;
  for (const auto& part : split(text, ',')) values.push_back(parse_double(part, "grid"));
  if (values.empty()) throw ConfigError("empty grid");
  return values;
}

// ---------------------------------------------------------------- spectrum

namespace {

struct SpectrumRow {
  double kick = 0.0;
  double coupling = 0.0;
  int realization = 0;
  double offset = 0.0;
  double ipr = 0.0;
  double staggered = 0.0;
  double entropy = 0.0;
  double gap_ratio = 0.0;
};

}  // namespace

void run_spectrum(const SpectrumOptions& opt) {
  const auto start = Clock::now();
  const ChainConfig& base = opt.base;
  base.validate();
  if (base.sites > dense_max_sites()) {
    throw ConfigError("spectrum needs L <= " + std::to_string(dense_max_sites()) +
                      " (dense threshold), got " + std::to_string(base.sites));
  }
  if (opt.realizations < 1) throw ConfigError("--realizations must be at least 1");
  if (opt.offset_range < 0.0) throw ConfigError("--offset-range must be non-negative");
  const std::vector<double> kicks = opt.kicks.empty() ? std::vector{base.kick} : opt.kicks;
  const std::vector<double> couplings =
      opt.couplings.empty() ? std::vector{base.coupling} : opt.couplings;
  // Fails early on a bad preset; O_F needs the state on every grid point.
  const StateVector psi0 = parse_state(opt.state, base.sites);
  const std::vector<double> offsets =
      draw_center_offsets(opt.realizations, opt.offset_range, opt.seed);
  prepare_output_directory(opt.out);

  // exp(-i H_XY T) depends on J only, so it is shared across K and offsets.
  const auto propagators = parallel_map<std::shared_ptr<const StaticPropagator>>(
      couplings.size(), opt.jobs, [&](std::size_t r) {
        ChainConfig c = base;
        c.coupling = couplings[r];
        c.validate();
        return build_static_propagator(c);
      });

  const std::size_t per_row = kicks.size() * offsets.size();
  const auto rows = parallel_map<SpectrumRow>(
      couplings.size() * per_row, opt.jobs, [&](std::size_t task) {
        const std::size_t r = task / per_row;
        const std::size_t k = (task % per_row) / offsets.size();
        const std::size_t q = task % offsets.size();
        ChainConfig c = base;
        c.coupling = couplings[r];
        c.kick = kicks[k];
        c.center_offset = base.center_offset + offsets[q];
        c.validate();
        FloquetOptions fo;
        fo.path = Propagation::dense;
        fo.propagator = propagators[r];
        const FloquetSpectrum s = diagonalize_floquet(build_floquet(c, fo));
        SpectrumRow row;
        row.kick = c.kick;
        row.coupling = c.coupling;
        row.realization = static_cast<int>(q);
        row.offset = c.center_offset;
        row.ipr = mean_ipr(s);
        row.staggered = diagonal_ensemble_staggered_mag(s, psi0);
        row.entropy = mean_block_entropy(s, c.sites / 2);
        row.gap_ratio = mean_gap_ratio(s.phases);
        return row;
      });

  RunManifest manifest(opt.out, opt.command);
  CsvWriter csv(opt.out / "spectrum.csv",
                {"K", "J", "L", "realization", "j0_offset", "I_F", "O_F", "S_F", "r_bar"});
  for (const auto& row : rows) {
    csv << row.kick << row.coupling << base.sites << row.realization << row.offset << row.ipr
        << row.staggered << row.entropy << row.gap_ratio;
    csv.end_row();
  }
  csv.close();
  manifest.add_output(csv.path(), csv.rows());

  if (kicks.size() >= 2) {
    ParameterGrid grid;
    grid.kicks = kicks;
    grid.couplings = couplings;
    grid.values = Eigen::MatrixXd::Zero(static_cast<Index>(couplings.size()),
                                        static_cast<Index>(kicks.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::size_t r = i / per_row;
      const std::size_t k = (i % per_row) / offsets.size();
      grid.values(static_cast<Index>(r), static_cast<Index>(k)) +=
          rows[i].ipr / static_cast<double>(offsets.size());
    }
    CsvWriter line(opt.out / "boundary.csv", {"J", "K"});
    for (const auto& p : boundary_trace(grid, opt.level)) {
      line << p.coupling << p.kick;
      line.end_row();
    }
    line.close();
    manifest.add_output(line.path(), line.rows());
  }

  nlohmann::json cfg;
  cfg["chain"] = config_json(base);
  cfg["K"] = kicks;
  cfg["J"] = couplings;
  cfg["realizations"] = opt.realizations;
  cfg["offset_range"] = opt.offset_range;
  cfg["state"] = opt.state;
  cfg["boundary_level"] = opt.level;
  manifest.set_config(cfg);
  manifest.set_seed(opt.seed);
  manifest.set_wall_time(seconds_since(start));
  manifest.save();
}

// ---------------------------------------------------------------- dynamics

void run_dynamics_command(const DynamicsCommandOptions& opt) {
  const auto start = Clock::now();
  const ChainConfig& c = opt.config;
  c.validate();
  const StateVector psi0 = parse_state(opt.state, c.sites);
  const int block = opt.block_sites.value_or(c.sites / 2);
  if (block < 1 || block >= c.sites) {
    throw ConfigError("--A must lie in 1..L-1, got " + std::to_string(block));
  }
  prepare_output_directory(opt.out);

  kxy::DynamicsOptions dyn;
  dyn.path = opt.path;
  const TimeSeries ts = run_dynamics(c, psi0, {opt.kicks, opt.stride}, block, dyn);

  RunManifest manifest(opt.out, opt.command);
  std::vector<std::string> raster_cols{"kick", "time"};
  for (int j = 1; j <= c.sites; ++j) raster_cols.push_back("P_up_" + std::to_string(j));
  CsvWriter raster(opt.out / "raster.csv", raster_cols);
  CsvWriter series(opt.out / "series.csv",
                   {"kick", "time", "imbalance", "sz_1", "S_A", "F_A"});
  for (Index s = 0; s < ts.size(); ++s) {
    const int n = ts.kicks[static_cast<std::size_t>(s)];
    raster << n << ts.times(s);
    for (int j = 0; j < c.sites; ++j) raster << ts.up_probability(s, j);
    raster.end_row();
    series << n << ts.times(s) << ts.imbalance(s) << ts.edge_sz(s) << ts.entropy(s)
           << ts.fidelity(s);
    series.end_row();
  }
  raster.close();
  series.close();
  manifest.add_output(raster.path(), raster.rows());
  manifest.add_output(series.path(), series.rows());

  nlohmann::json summary;
  summary["L"] = c.sites;
  summary["state"] = opt.state;
  summary["kicks"] = opt.kicks;
  summary["A"] = block;
  summary["rabi_frequency"] = rabi_frequency(c);
  summary["decoupled_sites"] = decoupled_sites(c, c.kick);
  const auto window_ok = [&](KickWindow w) {
    return opt.kicks >= w.last && w.first % opt.stride == 0 && w.last % opt.stride == 0;
  };
  summary["imbalance_average"] =
      window_ok(kImbalanceWindow) ? nlohmann::json(time_averaged_imbalance(ts)) : nlohmann::json();
  summary["saturation_entropy"] = window_ok(kSaturationWindow) && block == c.sites / 2
                                      ? nlohmann::json(saturation_entropy(ts))
                                      : nlohmann::json();

  CsvWriter spectrum(opt.out / "spectrum.csv", {"frequency", "magnitude"});
  if (ts.size() >= kMinSpectrumSamples) {
    const SpectrumEstimate est = edge_spin_spectrum(ts, 1);
    for (Index i = 0; i < est.frequencies.size(); ++i) {
      spectrum << est.frequencies(i) << est.magnitudes(i);
      spectrum.end_row();
    }
    summary["edge_peak_frequency"] = est.peak_frequency;
    summary["spectrum_resolution"] = est.resolution;
  } else {
    summary["edge_peak_frequency"] = nullptr;
    summary["spectrum_note"] = "fewer than " + std::to_string(kMinSpectrumSamples) + " snapshots";
  }
  spectrum.close();
  manifest.add_output(spectrum.path(), spectrum.rows());

  const auto summary_path = opt.out / "summary.json";
  {
    std::ofstream out(summary_path);
    out << summary.dump(2) << '\n';
    if (!out) throw ConfigError("cannot write " + summary_path.string());
  }
  manifest.add_output(summary_path);

  nlohmann::json cfg;
  cfg["chain"] = config_json(c);
  cfg["state"] = opt.state;
  cfg["kicks"] = opt.kicks;
  cfg["stride"] = opt.stride;
  cfg["A"] = block;
  manifest.set_config(cfg);
  manifest.set_wall_time(seconds_since(start));
  manifest.save();
}

// ----------------------------------------------------------------- dd-plan

void run_ddplan(const DDPlanOptions& opt, std::ostream& out) {
  if (opt.count && opt.site) throw ConfigError("--count and --site are exclusive");
  ChainConfig c;
  c.sites = opt.sites;
  c.period = opt.period;
  c.field = opt.field;
  // Arithmetic only, so no state-vector size cap on L.
  if (c.sites < 2) throw ConfigError("--L must be at least 2");
  if (!(c.period > 0.0)) throw ConfigError("--T must be positive");
  if (!std::isfinite(c.field)) throw ConfigError("--Omega must be finite");
  const double f_d = rabi_frequency(c);

  struct Row {
    int spacing;
    double kick;
    int count;
    std::vector<int> sites;
  };
  std::vector<Row> rows;
  if (opt.count) {
    const double k = kick_for_count(c.sites, *opt.count, c.period);
    rows.push_back({0, k, *opt.count, decoupled_sites(c, k)});
  } else if (opt.site) {
    const double k = kick_for_site(c, *opt.site, opt.multiple);
    const auto sites = decoupled_sites(c, k);
    rows.push_back({0, k, static_cast<int>(sites.size()), sites});
  } else {
    for (const auto& e : enumerate_dd_plan(c.sites, c.period, c.field).entries) {
      rows.push_back({e.spacing, e.kick, e.count, e.sites});
    }
  }

  const auto emit = [&](std::ostream& s) {
    s << "# schema=" << kCsvSchema << '\n' << "l,K,N_d,sites,f_d\n";
    for (const auto& r : rows) {
      s << r.spacing << ',' << format_number(r.kick) << ',' << r.count << ','
        << join_sites(r.sites) << ',' << format_number(f_d) << '\n';
    }
  };
  emit(out);
  if (opt.out) {
    prepare_output_directory(*opt.out);
    const auto path = *opt.out / "dd_plan.csv";
    {
      std::ofstream file(path);
      emit(file);
      if (!file) throw ConfigError("cannot write " + path.string());
    }
    RunManifest manifest(*opt.out, opt.command);
    nlohmann::json cfg;
    cfg["L"] = c.sites;
    cfg["T"] = c.period;
    cfg["Omega"] = c.field;
    if (opt.count) cfg["count"] = *opt.count;
    if (opt.site) {
      cfg["site"] = *opt.site;
      cfg["m"] = opt.multiple;
    }
    manifest.set_config(cfg);
    manifest.add_output(path, static_cast<int>(rows.size()));
    manifest.save();
  }
}

// ----------------------------------------------------------------- scaling

ScalingDataset read_scaling_dataset(const std::vector<std::filesystem::path>& inputs,
                                    ScalingObservable observable,
                                    std::optional<double> coupling) {
  if (inputs.empty()) throw ConfigError("no input CSVs");
  // (J, K, L) -> samples, kept in first-seen realization order.
  std::map<std::tuple<double, double, int>, std::vector<double>> grouped;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::string line;
    std::map<std::string, std::size_t> column;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line.front() == '#') continue;
      const auto fields = split(line, ',');
      if (column.empty()) {
        for (std::size_t i = 0; i < fields.size(); ++i) column[fields[i]] = i;
        for (const char* need : {"K", "J", "L", "O_F", "S_F"}) {
          if (!column.contains(need)) {
            throw ConfigError(path.string() + ": missing column '" + need + "'");
          }
        }
        continue;
      }
      if (fields.size() != column.size()) {
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": wrong field count");
      }
      const std::string where = path.string() + ":" + std::to_string(lineno);
      const double k = parse_double(fields[column["K"]], where);
      const double j = parse_double(fields[column["J"]], where);
      const double l = parse_double(fields[column["L"]], where);
      if (l < 2 || l != std::floor(l)) throw ConfigError(where + ": invalid L");
      double value = 0.0;
      if (observable == ScalingObservable::staggered) {
        value = parse_double(fields[column["O_F"]], where);
      } else {
        value = parse_double(fields[column["S_F"]], where) / l;
      }
      grouped[{j, k, static_cast<int>(l)}].push_back(value);
    }
    if (column.empty()) throw ConfigError(path.string() + ": no header row");
  }

  ScalingDataset data;
  data.observable = observable;
  for (const auto& [key, samples] : grouped) {
    data.points.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), samples});
  }
  const auto couplings = data.couplings();
  if (coupling) return data.at_coupling(*coupling);
  if (couplings.size() > 1) {
    throw ConfigError("inputs hold several J values; select one with --J");
  }
  return data;
}

void run_scaling(const ScalingOptions& opt) {
  const auto start = Clock::now();
  const ScalingDataset data = read_scaling_dataset(opt.inputs, opt.observable, opt.coupling);
  data.validate();
  if (opt.bootstrap < 0) throw ConfigError("--bootstrap must be non-negative");
  prepare_output_directory(opt.out);

  CollapseOptions co;
  co.bootstrap = opt.bootstrap;
  co.seed = opt.seed;
  const CollapseResult r = collapse(data, co);

  RunManifest manifest(opt.out, opt.command);
  CsvWriter curve(opt.out / "collapsed.csv", {"L", "K", "x", "value"});
  for (const auto& p : collapsed_curve(data, r.critical_kick, r.nu)) {
    curve << p.sites << p.kick << p.scaled << p.value;
    curve.end_row();
  }
  curve.close();
  manifest.add_output(curve.path(), curve.rows());

  nlohmann::json result;
  result["observable"] = to_string(opt.observable);
  result["J"] = data.couplings().empty() ? nlohmann::json() : nlohmann::json(data.couplings()[0]);
  result["sizes"] = data.sizes();
  result["K_c"] = r.critical_kick;
  result["nu"] = r.nu;
  result["K_c_error"] = r.critical_kick_error;
  result["nu_error"] = r.nu_error;
  result["cost"] = r.cost;
  result["unscaled_cost"] = r.unscaled_cost;
  result["non_critical"] = r.non_critical;
  result["bootstrap_samples"] = r.bootstrap_samples;
  result["bootstrap_unit"] = r.resampled_realizations ? "realizations" : "points";
  const auto result_path = opt.out / "collapse.json";
  {
    std::ofstream out(result_path);
    out << result.dump(2) << '\n';
    if (!out) throw ConfigError("cannot write " + result_path.string());
  }
  manifest.add_output(result_path);

  nlohmann::json cfg;
  std::vector<std::string> names;
  for (const auto& p : opt.inputs) names.push_back(p.generic_string());
  cfg["inputs"] = names;
  cfg["observable"] = to_string(opt.observable);
  cfg["bootstrap"] = opt.bootstrap;
  if (opt.coupling) cfg["J"] = *opt.coupling;
  manifest.set_config(cfg);
  manifest.set_seed(opt.seed);
  manifest.set_wall_time(seconds_since(start));
  manifest.save();
}

}  // namespace kxy::cli
