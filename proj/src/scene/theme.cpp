#include "cloudifier/scene/theme.hpp"

#include "cloudifier/common.hpp"

namespace cloudifier::scene {
namespace {

Theme classic(ThemeKind kind, Rgb desktop, Rgb title_b, Rgb inactive_b) {
  Theme t{};
  t.kind = kind;
  t.desktop = desktop;
  t.face = {192, 192, 192};
  t.highlight = {255, 255, 255};
  t.light = {223, 223, 223};
  t.shadow = {128, 128, 128};
  t.dark = {0, 0, 0};
  t.text = {0, 0, 0};
  t.disabled_text = {128, 128, 128};
  t.field = {255, 255, 255};
  t.selection = {0, 0, 128};
  t.title_active_a = {0, 0, 128};
  t.title_active_b = title_b;
  t.title_inactive_a = {128, 128, 128};
  t.title_inactive_b = inactive_b;
  t.title_text = {255, 255, 255};
  t.frame = {0, 0, 0};
  t.bevel = 2;
  return t;
}

Theme make_xp() {
  Theme t{};
  t.kind = ThemeKind::WinXp;
  t.desktop = {58, 110, 165};
  t.face = {236, 233, 216};
  t.highlight = {255, 255, 255};
  t.light = {241, 239, 226};
  t.shadow = {172, 168, 153};
  t.dark = {113, 111, 100};
  t.text = {0, 0, 0};
  t.disabled_text = {161, 161, 146};
  t.field = {255, 255, 255};
  t.selection = {49, 106, 197};
  t.title_active_a = {0, 84, 227};
  t.title_active_b = {61, 149, 255};
  t.title_inactive_a = {122, 150, 223};
  t.title_inactive_b = {157, 185, 235};
  t.title_text = {255, 255, 255};
  t.frame = {0, 60, 116};
  t.bevel = 1;
  t.rounded = true;
  return t;
}

Theme make_sketch() {
  Theme t{};
  t.kind = ThemeKind::Sketch;
  const Rgb paper{250, 249, 243};
  const Rgb pencil{48, 48, 56};
  t.desktop = t.face = t.field = t.highlight = t.light = paper;
  t.title_active_a = t.title_active_b = t.title_inactive_a = t.title_inactive_b = paper;
  t.shadow = t.dark = t.text = t.title_text = t.frame = t.selection = pencil;
  t.disabled_text = {150, 150, 156};
  t.bevel = 0;
  t.wobble = 2.0;
  return t;
}

}  // namespace

const char* theme_kind_name(ThemeKind k) {
  switch (k) {
    case ThemeKind::Win95: return "win95";
    case ThemeKind::Win98: return "win98";
    case ThemeKind::WinXp: return "winxp";
    case ThemeKind::Sketch: return "sketch";
    case ThemeKind::Mixed: return "mixed";
  }
  return "?";
}

ThemeKind parse_theme_kind(const std::string& s) {
  for (int i = 0; i <= 4; ++i) {
    const auto k = static_cast<ThemeKind>(i);
    if (s == theme_kind_name(k)) return k;
  }
  throw ConfigError("unknown theme '" + s + "' (expected win95, win98, winxp, sketch or mixed)");
}

ThemeKind theme_for_index(ThemeKind k, std::uint64_t index) {
  if (static_cast<int>(k) > 4) throw ConfigError("theme kind out of range");
  return k == ThemeKind::Mixed ? static_cast<ThemeKind>(index % 4) : k;
}

const Theme& theme(ThemeKind k) {
  static const Theme win95 = classic(ThemeKind::Win95, {0, 128, 128}, {0, 0, 128}, {128, 128, 128});
  static const Theme win98 =
      classic(ThemeKind::Win98, {58, 110, 165}, {16, 132, 208}, {192, 192, 192});
  static const Theme xp = make_xp();
  static const Theme sketch = make_sketch();
  switch (k) {
    case ThemeKind::Win95: return win95;
    case ThemeKind::Win98: return win98;
    case ThemeKind::WinXp: return xp;
    case ThemeKind::Sketch: return sketch;
    case ThemeKind::Mixed: break;
  }
  throw ConfigError("theme(): mixed is not a concrete theme");
}

}  // namespace cloudifier::scene
