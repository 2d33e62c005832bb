#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csd/fields.hpp"
#include "csd/lattice.hpp"

namespace csd::cli {

struct Preset {
  std::string name;
  int dim;
  Connectivity default_conn;
  int64_t default_extent;   // per axis
  uint64_t default_m;
};

const std::vector<Preset>& presets();
const Preset& preset_named(const std::string& name);  // throws on unknown names
FieldModel make_model(const std::string& preset_name);

/// "300x300" or "1500" -> per-axis extents.
std::vector<int64_t> parse_extents(const std::string& text);

Window window_from(const std::vector<int64_t>& extents);

}  // namespace csd::cli
