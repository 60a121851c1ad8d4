#pragma once

#include "kickedxy/core.hpp"

#include <optional>
#include <string>

namespace kxy::cli {

/// Initial state from a preset name or an explicit pattern:
///   neel, vacuum, domain_wall, global_bell, bell_pair:i,j,
///   or a U/D (1/0) string of length L with site 1 first.
StateVector parse_state(const std::string& text, int sites);

/// The product pattern behind a preset, when the state is a product state.
std::optional<ProductSpec> product_pattern(const std::string& text, int sites);

}  // namespace kxy::cli
