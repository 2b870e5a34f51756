#pragma once

#include <string>
#include <vector>

#include "cpt/config.hpp"

namespace cpt::presets {

struct PresetInfo {
  std::string name;
  std::string summary;  ///< caption-style parameter line
  std::string experiment;
};

/// Shipped reproduction presets in a fixed order.
const std::vector<PresetInfo>& table();

/// Full run configuration for a preset. Throws ConfigError for an unknown name.
config::RunConfig get(const std::string& name);

/// One "name: summary" line per preset, followed by an indented experiment line.
std::string format_table();

}  // namespace cpt::presets
