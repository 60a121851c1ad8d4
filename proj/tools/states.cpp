#include "states.hpp"

#include <charconv>

namespace kxy::cli {

namespace {

int parse_site(std::string_view text) {
  int value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ConfigError("invalid site '" + std::string(text) + "' in bell_pair");
  }
  return value;
}

}  // namespace

std::optional<ProductSpec> product_pattern(const std::string& text, int sites) {
  if (text == "neel") return ProductSpec::neel(sites);
  if (text == "vacuum") return ProductSpec::vacuum(sites);
  if (text == "domain_wall") return ProductSpec::domain_wall(sites);
  if (text == "global_bell" || text.starts_with("bell_pair")) return std::nullopt;
  if (text.empty()) throw ConfigError("empty state");
  const char first = text.front();
  if (first != 'U' && first != 'D' && first != 'u' && first != 'd' && first != '0' &&
      first != '1') {
    throw ConfigError("unknown state preset '" + text + "'");
  }
  const ProductSpec spec = ProductSpec::from_string(text);
  if (spec.sites() != sites) {
    throw ConfigError("pattern length " + std::to_string(spec.sites()) +
                      " does not match L = " + std::to_string(sites));
  }
  return spec;
}

StateVector parse_state(const std::string& text, int sites) {
  if (text == "global_bell") return make_global_bell(sites);
  if (text.starts_with("bell_pair")) {
    const std::string_view rest = std::string_view(text).substr(9);
    const auto comma = rest.find(',');
    if (rest.empty() || rest.front() != ':' || comma == std::string_view::npos) {
      throw ConfigError("bell_pair needs two sites, e.g. bell_pair:4,5");
    }
    return make_bell_pair(sites, parse_site(rest.substr(1, comma - 1)),
                          parse_site(rest.substr(comma + 1)));
  }
  return make_product_state(*product_pattern(text, sites));
}

}  // namespace kxy::cli
