#pragma once

#include <cstdint>

#include "cloudifier/scene/canvas.hpp"
#include "cloudifier/scene/taxonomy.hpp"

namespace cloudifier::scene {

struct SizeRange {
  int min_w, max_w, min_h, max_h;
  bool admits(int w, int h) const { return w >= min_w && w <= max_w && h >= min_h && h <= max_h; }
};

// Admissible widget sizes for a fine class (background has none).
SizeRange size_range(int fine_id);

// Renders one widget of `fine_id` at w x h. Byte-identical for identical
// arguments. Throws ConfigError when the size is outside size_range().
Patch render_widget(int fine_id, const Theme& theme, int w, int h, std::uint64_t style_seed);

}  // namespace cloudifier::scene
