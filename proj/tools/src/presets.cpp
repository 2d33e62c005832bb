#include "presets.hpp"

#include <sstream>
#include <stdexcept>

namespace csd::cli {

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = {
      {"wn1d", 1, Connectivity::Nearest, 1500, 10000},
      {"wn2d", 2, Connectivity::Moore, 300, 2000},
      {"sq-exp-1d", 1, Connectivity::Nearest, 1500, 10000},
      {"sq-exp-2d", 2, Connectivity::Nearest, 300, 2000},
      {"chisq-2d", 2, Connectivity::Moore, 300, 2000},
      {"cos-nonstat-1d", 1, Connectivity::Nearest, 1500, 10000},
  };
  return all;
}

const Preset& preset_named(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  std::ostringstream os;
  os << "unknown preset '" << name << "'; available:";
  for (const auto& p : presets()) os << ' ' << p.name;
  throw std::invalid_argument(os.str());
}

FieldModel make_model(const std::string& preset_name) {
  const Preset& p = preset_named(preset_name);
  if (p.name == "wn1d" || p.name == "wn2d") return FieldModel::white_noise(p.dim);
  if (p.name == "sq-exp-1d" || p.name == "sq-exp-2d")
    return FieldModel::stationary_gaussian(p.dim, CovarianceKernel::squared_exponential());
  if (p.name == "chisq-2d")
    return FieldModel::chi_squared(p.dim, CovarianceKernel::squared_exponential());
  return FieldModel::nonstationary_cos(CovarianceKernel::squared_exponential());
}

std::vector<int64_t> parse_extents(const std::string& text) {
  std::vector<int64_t> out;
  std::string token;
  std::istringstream is(text);
  while (std::getline(is, token, 'x')) {
    if (token.empty()) throw std::invalid_argument("bad window spec: " + text);
    out.push_back(std::stoll(token));
  }
  if (out.empty()) throw std::invalid_argument("bad window spec: " + text);
  return out;
}

Window window_from(const std::vector<int64_t>& extents) { return Window::centered(extents); }

}  // namespace csd::cli
