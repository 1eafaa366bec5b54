#include <cmath>
#include <fstream>
#include <sstream>

#include "cloudifier/augment/augment.hpp"
#include "cloudifier/common.hpp"

namespace cloudifier::augment {
namespace {

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("augment policy: bad number for " + key + ": '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 1e9) {
    throw ConfigError("augment policy: " + key + " must be an integer, got '" + v + "'");
  }
  return static_cast<int>(d);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void AugmentPolicy::validate() const {
  if (rotation_range < 0 || shift_range < 0 || channel_shift_range < 0) {
    throw ConfigError("augment policy: ranges must be non-negative");
  }
  if (!(rescale_min > 0) || rescale_max < rescale_min) {
    throw ConfigError("augment policy: rescale interval must be positive and ordered");
  }
  if (flip_probability < 0 || flip_probability > 1) {
    throw ConfigError("augment policy: flip_probability must be in [0, 1]");
  }
  if (crop <= 0) throw ConfigError("augment policy: crop must be positive");
  if (expansion_factor < 1) throw ConfigError("augment policy: expansion_factor must be at least 1");
}

std::string AugmentPolicy::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "rotation_range=" << rotation_range << '\n'
      << "shift_range=" << shift_range << '\n'
      << "channel_shift_range=" << channel_shift_range << '\n'
      << "flip=" << (flip ? 1 : 0) << '\n'
      << "flip_probability=" << flip_probability << '\n'
      << "rescale_min=" << rescale_min << '\n'
      << "rescale_max=" << rescale_max << '\n'
      << "crop=" << crop << '\n'
      << "expansion_factor=" << expansion_factor << '\n';
  return out.str();
}

AugmentPolicy AugmentPolicy::parse(const std::string& text) {
  AugmentPolicy p;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("augment policy line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "rotation_range") p.rotation_range = to_double(key, value);
    else if (key == "shift_range") p.shift_range = to_double(key, value);
    else if (key == "channel_shift_range") p.channel_shift_range = to_int(key, value);
    else if (key == "flip") p.flip = to_int(key, value) != 0;
    else if (key == "flip_probability") p.flip_probability = to_double(key, value);
    else if (key == "rescale_min") p.rescale_min = to_double(key, value);
    else if (key == "rescale_max") p.rescale_max = to_double(key, value);
    else if (key == "crop") p.crop = to_int(key, value);
    else if (key == "expansion_factor") p.expansion_factor = to_int(key, value);
    else throw ConfigError("augment policy line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  p.validate();
  return p;
}

AugmentPolicy AugmentPolicy::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read augment policy file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void AugmentPolicy::save(const std::string& path) const {
  std::ofstream out(path);
  out << to_text();
  if (!out) throw ConfigError("cannot write augment policy file '" + path + "'");
}

}  // namespace cloudifier::augment
