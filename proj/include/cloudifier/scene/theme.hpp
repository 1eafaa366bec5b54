#pragma once

#include <cstdint>
#include <string>

namespace cloudifier::scene {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Stored as a u8 in dataset headers. Mixed assigns Win95, Win98, WinXp,
// Sketch round-robin by observation index.
enum class ThemeKind : std::uint8_t { Win95 = 0, Win98 = 1, WinXp = 2, Sketch = 3, Mixed = 4 };
const char* theme_kind_name(ThemeKind k);
ThemeKind parse_theme_kind(const std::string& s);
// Concrete theme of observation `index` in a dataset generated as `k`.
ThemeKind theme_for_index(ThemeKind k, std::uint64_t index);
// Sketch is the stand-in for hand-drawn data; the rest are artificial.
inline bool is_sketch(ThemeKind k) { return k == ThemeKind::Sketch; }

struct Theme {
  ThemeKind kind;
  Rgb desktop;      // screen background, also the out-of-bounds fill
  Rgb face;         // window client area and button faces
  Rgb highlight;    // outer light bevel edge
  Rgb light;        // inner light bevel edge
  Rgb shadow;       // inner dark bevel edge
  Rgb dark;         // outer dark bevel edge
  Rgb text;
  Rgb disabled_text;
  Rgb field;        // edit and list backgrounds
  Rgb selection;
  Rgb title_active_a, title_active_b;  // gradient ends (equal when flat)
  Rgb title_inactive_a, title_inactive_b;
  Rgb title_text;
  Rgb frame;        // XP window and button border
  int bevel = 2;
  bool rounded = false;   // XP rounded corners
  double wobble = 0.0;    // sketch stroke displacement bound, px
};

// Concrete themes only; Mixed throws ConfigError.
const Theme& theme(ThemeKind k);

}  // namespace cloudifier::scene
