#include "kickedxy/core.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace kxy {

void ChainConfig::validate() const {
  if (sites < 2) throw ConfigError("L must be at least 2");
  if (sites > kMaxSites) {
    throw ConfigError("L = " + std::to_string(sites) + " exceeds the maximum " +
                      std::to_string(kMaxSites));
  }
  if (!(period > 0.0)) throw ConfigError("T must be positive");
  if (!(kick >= 0.0)) throw ConfigError("K must be non-negative");
  if (!(coupling >= 0.0)) throw ConfigError("J must be non-negative");
  if (!std::isfinite(field) || !std::isfinite(center_offset) ||
      !std::isfinite(kick) || !std::isfinite(coupling) ||
      !std::isfinite(period)) {
    throw ConfigError("model parameters must be finite");
  }
}

namespace {

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

std::string config_to_json(const ChainConfig& config) {
  nlohmann::ordered_json j;
  j["L"] = config.sites;
  j["J"] = config.coupling;
  j["Omega"] = config.field;
  j["K"] = config.kick;
  j["T"] = config.period;
  j["j0_offset"] = config.center_offset;
  return j.dump(2);
}

ChainConfig config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a flat key-value object");
  static const char* const known[] = {"L", "J", "Omega", "K", "T", "j0_offset"};
  for (const auto& item : j.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
          return item.key() == k;
        }) == std::end(known)) {
      throw ConfigError("unknown config key '" + item.key() + "'");
    }
  }
  ChainConfig config;
  read_key(j, "L", config.sites);
  read_key(j, "J", config.coupling);
  read_key(j, "Omega", config.field);
  read_key(j, "K", config.kick);
  read_key(j, "T", config.period);
  read_key(j, "j0_offset", config.center_offset);
  config.validate();
  return config;
}

ChainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str());
}

void save_config(const ChainConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file " + path.string());
  out << config_to_json(config) << '\n';
}

std::uint64_t ProductSpec::basis_index() const {
  std::uint64_t index = 0;
  for (std::size_t j = 0; j < pattern.size(); ++j) {
    if (pattern[j] == Spin::up) index |= std::uint64_t{1} << j;
  }
  return index;
}

ProductSpec ProductSpec::neel(int sites) {
  ProductSpec spec;
  for (int j = 1; j <= sites; ++j) {
    spec.pattern.push_back(j % 2 == 1 ? Spin::up : Spin::down);
  }
  return spec;
}

ProductSpec ProductSpec::vacuum(int sites) {
  return ProductSpec{std::vector<Spin>(static_cast<std::size_t>(sites),
                                       Spin::down)};
}

ProductSpec ProductSpec::single_excitation(int sites, int site) {
  if (site < 1 || site > sites) {
    throw ConfigError("single excitation site out of range");
  }
  ProductSpec spec = vacuum(sites);
  spec.pattern[site - 1] = Spin::up;
  return spec;
}

ProductSpec ProductSpec::domain_wall(int sites) {
  ProductSpec spec = vacuum(sites);
  for (int j = 1; j <= sites / 2; ++j) spec.pattern[j - 1] = Spin::up;
  return spec;
}

ProductSpec ProductSpec::from_string(const std::string& text) {
  ProductSpec spec;
  for (char c : text) {
    switch (c) {
      case 'U': case 'u': case '1': spec.pattern.push_back(Spin::up); break;
      case 'D': case 'd': case '0': spec.pattern.push_back(Spin::down); break;
      default:
        throw ConfigError(std::string("invalid spin symbol '") + c +
                          "' in pattern");
    }
  }
  return spec;
}

StateVector make_product_state(const ProductSpec& spec) {
  const int sites = spec.sites();
  if (sites < 1 || sites > kMaxSites) {
    throw ConfigError("product pattern length out of range");
  }
  StateVector psi{sites, Eigen::VectorXcd::Zero(Index{1} << sites)};
  psi.amplitudes(static_cast<Index>(spec.basis_index())) = 1.0;
  return psi;
}

StateVector make_product_state(const ProductSpec& spec, int sites) {
  if (spec.sites() != sites) {
    throw ConfigError("pattern length " + std::to_string(spec.sites()) +
                      " does not match L = " + std::to_string(sites));
  }
  return make_product_state(spec);
}

StateVector make_bell_pair(int sites, int first, int second) {
  if (sites < 2 || sites > kMaxSites) throw ConfigError("L out of range");
  if (first < 1 || first > sites || second < 1 || second > sites) {
    throw ConfigError("Bell pair site out of range");
  }
  if (first == second) throw ConfigError("Bell pair sites must differ");
  StateVector psi{sites, Eigen::VectorXcd::Zero(Index{1} << sites)};
  const double amp = 1.0 / std::sqrt(2.0);
  psi.amplitudes(Index{1} << (first - 1)) = amp;
  psi.amplitudes(Index{1} << (second - 1)) = amp;
  return psi;
}

StateVector make_global_bell(int sites) {
  if (sites < 2 || sites > kMaxSites) throw ConfigError("L out of range");
  ProductSpec c = ProductSpec::vacuum(sites);
  for (int j = 2; j <= 1 + sites / 2; ++j) c.pattern[j - 1] = Spin::up;
  const std::uint64_t index = c.basis_index();
  const std::uint64_t flipped = index ^ ((std::uint64_t{1} << sites) - 1);
  StateVector psi{sites, Eigen::VectorXcd::Zero(Index{1} << sites)};
  const double amp = 1.0 / std::sqrt(2.0);
  psi.amplitudes(static_cast<Index>(index)) = amp;
  psi.amplitudes(static_cast<Index>(flipped)) = amp;
  return psi;
}

StateVector make_state(int sites, Eigen::VectorXcd amplitudes) {
  if (sites < 1 || sites > kMaxSites) throw ConfigError("L out of range");
  if (amplitudes.size() != (Index{1} << sites)) {
    throw ConfigError("amplitude count does not match 2^L");
  }
  if (std::abs(amplitudes.norm() - 1.0) > 1e-10) {
    throw ConfigError("state is not normalized");
  }
  return StateVector{sites, std::move(amplitudes)};
}

double sigma_z_expectation(const StateVector& psi, int site) {
  if (site < 1 || site > psi.sites) throw ConfigError("site out of range");
  const Index mask = Index{1} << (site - 1);
  double value = 0.0;
  for (Index b = 0; b < psi.dimension(); ++b) {
    const double p = std::norm(psi.amplitudes(b));
    value += (b & mask) ? p : -p;
  }
  return value;
}

Eigen::VectorXd sigma_z_profile(const StateVector& psi) {
  // Accumulate the up-probability per site, then map to <sigma^z>.
  Eigen::VectorXd up = Eigen::VectorXd::Zero(psi.sites);
  double total = 0.0;
  for (Index b = 0; b < psi.dimension(); ++b) {
    const double p = std::norm(psi.amplitudes(b));
    if (p == 0.0) continue;
    total += p;
    for (int j = 0; j < psi.sites; ++j) {
      if ((b >> j) & 1) up(j) += p;
    }
  }
  return 2.0 * up.array() - total;
}

ReducedDensityMatrix reduce_to_block(const StateVector& psi, int block_sites) {
  if (block_sites < 1 || block_sites >= psi.sites) {
    throw ConfigError("block size must satisfy 1 <= A < L");
  }
  // With site 1 as the least significant bit, the amplitude array is the
  // column-major (2^A x 2^(L-A)) matrix psi(kept, traced).
  const Index kept = Index{1} << block_sites;
  const Index traced = Index{1} << (psi.sites - block_sites);
  const Eigen::Map<const Eigen::MatrixXcd> m(psi.amplitudes.data(), kept,
                                             traced);
  ReducedDensityMatrix rho{block_sites, Eigen::MatrixXcd(kept, kept)};
  rho.matrix.noalias() = m * m.adjoint();
  return rho;
}

double entanglement_entropy(const ReducedDensityMatrix& rho) {
  return von_neumann_entropy(rho.matrix);
}

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho);
  if (solver.info() != Eigen::Success) {
    throw NumericError("psd_sqrt: eigendecomposition failed");
  }
  const Eigen::VectorXd roots =
      solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * roots.asDiagonal() *
         solver.eigenvectors().adjoint();
}

double uhlmann_fidelity(const ReducedDensityMatrix& rho1,
                        const ReducedDensityMatrix& rho2) {
  if (rho1.matrix.rows() != rho2.matrix.rows() ||
      rho1.matrix.cols() != rho2.matrix.cols()) {
    throw ConfigError("fidelity: dimension mismatch");
  }
  const Eigen::MatrixXcd root = psd_sqrt(rho1.matrix);
  Eigen::MatrixXcd inner = root * rho2.matrix * root;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      inner, Eigen::EigenvaluesOnly);
  double trace = 0.0;
  for (double lambda : solver.eigenvalues()) {
    if (lambda > 0.0) trace += std::sqrt(lambda);
  }
  return trace * trace;
}

}  // namespace kxy
