#include "cloudifier/model/network_config.hpp"

#include <sstream>

#include "cloudifier/common.hpp"

namespace cloudifier::model {
namespace {

constexpr const char* kDescriptorFormat = "cfnet/1";

BlockSpec stem(int maps) { return {BlockKind::Stem, maps, 1, false}; }
BlockSpec inc(int maps) { return {BlockKind::IncRes, maps, 1, false}; }
BlockSpec ds(int maps) { return {BlockKind::DsRes, maps, 1, true}; }
BlockSpec down(int maps) { return {BlockKind::DownsampleConv, maps, 2, false}; }

BlockKind kind_from_name(const std::string& s) {
  if (s == "stem") return BlockKind::Stem;
  if (s == "incres") return BlockKind::IncRes;
  if (s == "dsres") return BlockKind::DsRes;
  if (s == "down") return BlockKind::DownsampleConv;
  throw ConfigError("descriptor: unknown block kind '" + s + "'");
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size() || v < 0 || v > 1'000'000'000LL) throw std::invalid_argument(value);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ConfigError("descriptor: bad integer for " + key + ": '" + value + "'");
  }
}

}  // namespace

const char* block_kind_name(BlockKind kind) {
  switch (kind) {
    case BlockKind::Stem: return "stem";
    case BlockKind::IncRes: return "incres";
    case BlockKind::DsRes: return "dsres";
    case BlockKind::DownsampleConv: return "down";
  }
  return "?";
}

int NetworkConfig::max_downsample() const {
  int factor = 1;
  for (const auto& b : blocks) factor *= b.stride;
  return factor;
}

void NetworkConfig::validate() const {
  if (num_classes < 2) throw ConfigError("network: need at least 2 classes");
  if (input_channels <= 0) throw ConfigError("network: input_channels must be positive");
  if (branch_maps <= 0) throw ConfigError("network: branch_maps must be positive");
  if (blocks.empty() || blocks.front().kind != BlockKind::Stem) {
    throw ConfigError("network: first block must be the stem conv");
  }
  bool any_tap = false;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    const std::string where = "block " + std::to_string(i) + " (" + block_kind_name(b.kind) + ")";
    if (b.out_maps <= 0) throw ConfigError(where + ": out_maps must be positive");
    if (i > 0 && b.kind == BlockKind::Stem) throw ConfigError(where + ": stem must come first");
    if (b.kind == BlockKind::DownsampleConv) {
      if (b.stride != 2) throw ConfigError(where + ": downsampling uses stride 2");
    } else if (b.stride != 1) {
      throw ConfigError(where + ": only downsampling convs may be strided");
    }
    if (b.tap && b.kind != BlockKind::DsRes) throw ConfigError(where + ": only DS RES blocks are tapped");
    if (b.kind == BlockKind::IncRes && b.out_maps % 4 != 0) {
      throw ConfigError(where + ": IncRes out_maps must be divisible by 4");
    }
    any_tap = any_tap || b.tap;
  }
  if (!any_tap) throw ConfigError("network: at least one DS RES block must be tapped");
}

std::string NetworkConfig::descriptor() const {
  std::ostringstream out;
  out << "format=" << kDescriptorFormat << '\n';
  out << "variant=" << variant << '\n';
  out << "num_classes=" << num_classes << '\n';
  out << "input_channels=" << input_channels << '\n';
  out << "branch_maps=" << branch_maps << '\n';
  if (expected_layers) out << "expected_layers=" << *expected_layers << '\n';
  if (min_params) out << "min_params=" << *min_params << '\n';
  if (max_params) out << "max_params=" << *max_params << '\n';
  for (const auto& b : blocks) {
    out << "block=" << block_kind_name(b.kind) << ':' << b.out_maps;
    if (b.tap) out << ":tap";
    out << '\n';
  }
  return out.str();
}

NetworkConfig NetworkConfig::parse_descriptor(const std::string& text) {
  NetworkConfig cfg;
  std::istringstream in(text);
  std::string line;
  bool saw_format = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("descriptor: malformed line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "format") {
      if (value != kDescriptorFormat) throw ConfigError("descriptor: unsupported format '" + value + "'");
      saw_format = true;
    } else if (key == "variant") {
      cfg.variant = value;
    } else if (key == "num_classes") {
      cfg.num_classes = parse_int(key, value);
    } else if (key == "input_channels") {
      cfg.input_channels = parse_int(key, value);
    } else if (key == "branch_maps") {
      cfg.branch_maps = parse_int(key, value);
    } else if (key == "expected_layers") {
      cfg.expected_layers = parse_int(key, value);
    } else if (key == "min_params") {
      cfg.min_params = static_cast<std::size_t>(parse_int(key, value));
    } else if (key == "max_params") {
      cfg.max_params = static_cast<std::size_t>(parse_int(key, value));
    } else if (key == "block") {
      std::vector<std::string> parts;
      std::istringstream fields(value);
      std::string f;
      while (std::getline(fields, f, ':')) parts.push_back(f);
      if (parts.size() < 2 || parts.size() > 3 || (parts.size() == 3 && parts[2] != "tap")) {
        throw ConfigError("descriptor: malformed block '" + value + "'");
      }
      BlockSpec b{kind_from_name(parts[0]), parse_int(key, parts[1]), 1, parts.size() == 3};
      if (b.kind == BlockKind::DownsampleConv) b.stride = 2;
      cfg.blocks.push_back(b);
    } else {
      throw ConfigError("descriptor: unknown key '" + key + "'");
    }
  }
  if (!saw_format) throw ConfigError("descriptor: missing format line");
  cfg.validate();
  return cfg;
}

// Stages at cumulative strides 1, 2, 4, 8. Every DS RES block is tapped; the
// width grows inside IncRes stems or through DS RES projections.
NetworkConfig cloudifier109(int num_classes) {
  NetworkConfig cfg;
  cfg.variant = "cloudifier109";
  cfg.num_classes = num_classes;
  cfg.branch_maps = 6;
  cfg.blocks = {stem(16),
                inc(16), ds(16), inc(16), ds(24),
                down(24),
                inc(32), ds(32), inc(32), ds(48),
                down(48),
                inc(64), ds(64), inc(64), ds(64), inc(64), ds(96),
                down(96),
                inc(96), ds(96), inc(96), ds(112), inc(112), ds(112)};
  cfg.expected_layers = 109;
  cfg.min_params = 1'000'000;
  cfg.max_params = 1'400'000;
  return cfg;
}

NetworkConfig cloudifier50(int num_classes) {
  NetworkConfig cfg;
  cfg.variant = "cloudifier50";
  cfg.num_classes = num_classes;
  cfg.branch_maps = 6;
  cfg.blocks = {stem(16),
                inc(16), ds(24),
                down(24),
                inc(32), ds(32),
                down(32),
                inc(64), ds(64), ds(96),
                down(96),
                inc(96), ds(96)};
  cfg.expected_layers = 50;
  return cfg;
}

NetworkConfig micro(int num_classes) {
  NetworkConfig cfg;
  cfg.variant = "micro";
  cfg.num_classes = num_classes;
  cfg.branch_maps = 8;
  cfg.blocks = {stem(8), inc(8), ds(8), down(16), inc(16), ds(16), down(16), inc(16), ds(16)};
  return cfg;
}

NetworkConfig variant_by_name(const std::string& name, int num_classes) {
  if (name == "cloudifier109") return cloudifier109(num_classes);
  if (name == "cloudifier50") return cloudifier50(num_classes);
  if (name == "micro") return micro(num_classes);
  throw ConfigError("unknown network variant '" + name + "'");
}

}  // namespace cloudifier::model
