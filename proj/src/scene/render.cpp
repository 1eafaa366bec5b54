#include "cloudifier/scene/render.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cloudifier/common.hpp"

namespace cloudifier::scene {
namespace {

using Points = std::vector<std::pair<double, double>>;

struct Ctx {
  Patch& p;
  const Theme& t;
  Rng& rng;
  int w, h;

  bool sketch() const { return t.kind == ThemeKind::Sketch; }
  bool xp() const { return t.kind == ThemeKind::WinXp; }
  Rect full() const { return {0, 0, w, h}; }
  // Small outlines get a tighter wobble so they stay inside their region.
  double amp(int extent) const { return extent < 20 ? std::min(t.wobble, 1.0) : t.wobble; }
};

constexpr Rgb kXpField{127, 157, 185};
constexpr Rgb kXpCheck{33, 161, 33};
constexpr Rgb kXpControl{28, 81, 128};
constexpr Rgb kXpArrow{77, 97, 133};

void raised(Ctx& c, const Rect& r) {
  if (c.t.bevel >= 2) {
    c.p.bevel(r, c.t.highlight, c.t.dark, c.t.light, c.t.shadow);
  } else {
    c.p.outline(r, c.t.frame);
  }
}

void sunken(Ctx& c, const Rect& r) {
  if (c.t.bevel >= 2) {
    c.p.bevel(r, c.t.shadow, c.t.highlight, c.t.dark, c.t.light);
  } else {
    c.p.outline(r, kXpField);
  }
}

void round_corners(Patch& p, const Rect& r, bool top_only = false) {
  const int x0 = r.x, x1 = r.right() - 1, y0 = r.y, y1 = r.bottom() - 1;
  for (const auto& [x, y] : {std::pair{x0, y0}, {x0 + 1, y0}, {x0, y0 + 1}, {x1, y0}, {x1 - 1, y0},
                            {x1, y0 + 1}}) {
    p.release(x, y);
  }
  if (top_only) return;
  for (const auto& [x, y] : {std::pair{x0, y1}, {x0 + 1, y1}, {x0, y1 - 1}, {x1, y1}, {x1 - 1, y1},
                            {x1, y1 - 1}}) {
    p.release(x, y);
  }
}

// Centered caption box inside `inner`.
Rect caption_box(Ctx& c, const Rect& inner, double min_frac, double max_frac) {
  const int th = std::clamp(inner.h / 2, 2, 7);
  const int tw = std::max(3, static_cast<int>(std::lround(inner.w * c.rng.uniform(min_frac, max_frac))));
  return {inner.x + (inner.w - tw) / 2, inner.y + (inner.h - th) / 2, tw, th};
}

void text(Ctx& c, const Rect& area, Rgb color, bool bold = false) {
  if (c.sketch()) {
    c.p.scribble(area, color, c.rng);
  } else {
    c.p.glyphs(area, color, c.rng, bold);
  }
}

void arrow(Patch& p, const Rect& r, int dir, Rgb color) {
  // dir: 0 up, 1 down, 2 left, 3 right
  const double cx = r.x + r.w / 2.0, cy = r.y + r.h / 2.0;
  const double s = std::max(1.5, std::min(r.w, r.h) / 4.0);
  Points pts;
  switch (dir) {
    case 0: pts = {{cx - s, cy + s / 2}, {cx + s, cy + s / 2}, {cx, cy - s / 2}}; break;
    case 1: pts = {{cx - s, cy - s / 2}, {cx + s, cy - s / 2}, {cx, cy + s / 2}}; break;
    case 2: pts = {{cx + s / 2, cy - s}, {cx + s / 2, cy + s}, {cx - s / 2, cy}}; break;
    default: pts = {{cx - s / 2, cy - s}, {cx - s / 2, cy + s}, {cx + s / 2, cy}}; break;
  }
  p.fill_polygon(pts, color);
}

void sketch_arrow(Ctx& c, const Rect& r, int dir) {
  const double cx = r.x + r.w / 2.0, cy = r.y + r.h / 2.0;
  const double s = std::max(1.5, std::min(r.w, r.h) / 4.0);
  const double a = std::min(c.t.wobble, 0.5);
  if (dir <= 1) {
    const double tip = dir == 0 ? cy - s / 2 : cy + s / 2;
    const double base = dir == 0 ? cy + s / 2 : cy - s / 2;
    c.p.sketch_line(cx - s, base, cx, tip, c.t.text, a, c.rng);
    c.p.sketch_line(cx, tip, cx + s, base, c.t.text, a, c.rng);
  } else {
    const double tip = dir == 2 ? cx - s / 2 : cx + s / 2;
    const double base = dir == 2 ? cx + s / 2 : cx - s / 2;
    c.p.sketch_line(base, cy - s, tip, cy, c.t.text, a, c.rng);
    c.p.sketch_line(tip, cy, base, cy + s, c.t.text, a, c.rng);
  }
}

void window(Ctx& c, bool active) {
  Patch& p = c.p;
  const Theme& t = c.t;
  const int w = c.w, h = c.h;
  const Rect full = c.full();
  p.claim_rect(full, false);
  if (c.sketch()) {
    const int b = 5;
    const int th = std::clamp(h / 7, 8, 16);
    for (const Rect& r : {Rect{0, 0, w, b}, Rect{0, h - b, w, b}, Rect{0, 0, b, h}, Rect{w - b, 0, b, h},
                          Rect{0, 0, w, b + th + 3}}) {
      p.claim_rect(r, true);
    }
    p.fill_rect(full, t.face);
    p.sketch_rect(full.inset(2), t.text, t.wobble, c.rng);
    p.sketch_line(b, b + th, w - b, b + th, t.text, t.wobble, c.rng);
    const Rgb ink = active ? t.text : t.disabled_text;
    p.scribble({b + 3, b + th / 2 - 2, std::max(4, w / 2 - b), 5}, ink, c.rng);
    if (w > 4 * th + 2 * b) {
      const Rect box{w - b - th + 1, b + 1, th - 3, th - 3};
      p.sketch_rect(box, t.text, 1.0, c.rng);
      p.sketch_line(box.x + 1, box.y + 1, box.right() - 1, box.bottom() - 1, t.text, 0.5, c.rng);
      p.sketch_line(box.right() - 1, box.y + 1, box.x + 1, box.bottom() - 1, t.text, 0.5, c.rng);
    }
    return;
  }

  const int b = c.xp() ? 3 : 4;
  const int th = c.xp() ? std::clamp(h / 7, 12, 22) : std::clamp(h / 8, 10, 18);
  const Rect title = c.xp() ? Rect{0, 0, w, b + th} : Rect{b, b, w - 2 * b, th};
  for (const Rect& r : {Rect{0, 0, w, b}, Rect{0, h - b, w, b}, Rect{0, 0, b, h}, Rect{w - b, 0, b, h}, title}) {
    p.claim_rect(r, true);
  }
  p.fill_rect(full, t.face);
  const Rgb ta = active ? t.title_active_a : t.title_inactive_a;
  const Rgb tb = active ? t.title_active_b : t.title_inactive_b;
  if (c.xp()) {
    round_corners(p, full, true);
    for (const Rect& r : {Rect{0, 0, w, b}, Rect{0, h - b, w, b}, Rect{0, 0, b, h}, Rect{w - b, 0, b, h}}) {
      p.fill_rect(r, ta);
    }
    p.gradient_v(title, tb, ta);
    p.outline(full, t.frame);
  } else {
    raised(c, full);
    p.gradient_h(title, ta, tb);
  }
  const Rect bar{title.x, title.bottom() - th, title.w, th};
  const int tth = std::clamp(th / 2, 3, 7);
  const int bs = th - 4;
  const int buttons = w > 2 * b + 3 * (bs + 2) + 40 ? 3 : 0;
  const int text_w = std::max(4, std::min(w / 2, bar.w - buttons * (bs + 2) - 10));
  p.glyphs({bar.x + 4, bar.y + (th - tth) / 2, text_w, tth}, t.title_text, c.rng, true);
  for (int i = 0; i < buttons; ++i) {
    const Rect r{bar.right() - 2 - (i + 1) * (bs + 2), bar.y + 2, bs, bs};
    if (c.xp()) {
      const Rgb fill = i == 0 ? Rgb{224, 67, 22} : Rgb{49, 106, 197};
      p.fill_rect(r, fill);
      p.outline(r, t.highlight);
      if (i == 0) {
        p.line(r.x + 3, r.y + 3, r.right() - 4, r.bottom() - 4, t.highlight);
        p.line(r.right() - 4, r.y + 3, r.x + 3, r.bottom() - 4, t.highlight);
      }
    } else {
      p.fill_rect(r, t.face);
      raised(c, r);
      if (i == 0) {
        p.line(r.x + 3, r.y + 3, r.right() - 4, r.bottom() - 4, t.text);
        p.line(r.right() - 4, r.y + 3, r.x + 3, r.bottom() - 4, t.text);
      } else {
        p.hline(r.x + 3, r.right() - 4, r.bottom() - 4, t.text);
      }
    }
  }
}

enum class ButtonState { Normal, Pressed, Default, Disabled };

void button(Ctx& c, ButtonState state) {
  Patch& p = c.p;
  const Theme& t = c.t;
  const Rect full = c.full();
  p.claim_rect(full, true);
  p.fill_rect(full, t.face);
  const bool pressed = state == ButtonState::Pressed;
  const bool disabled = state == ButtonState::Disabled;
  if (c.sketch()) {
    const double a = c.amp(std::min(c.w, c.h));
    p.sketch_rect(full.inset(2), t.text, a, c.rng);
    if (pressed && c.h >= 14) p.sketch_rect(full.inset(4), t.text, std::min(a, 1.0), c.rng);
    if (state == ButtonState::Default) p.sketch_rect(full.inset(3), t.text, std::min(a, 1.0), c.rng);
    const Rect cap = caption_box(c, full.inset(5), 0.35, 0.7);
    p.scribble(cap, disabled ? t.disabled_text : t.text, c.rng);
    return;
  }
  Rect body = full;
  if (c.xp()) {
    round_corners(p, full);
    if (pressed) {
      p.gradient_v(full, {226, 223, 214}, {240, 240, 234});
    } else {
      p.gradient_v(full, {255, 255, 255}, {236, 235, 230});
    }
    p.outline(full, disabled ? t.disabled_text : t.frame);
    if (state == ButtonState::Default) p.outline(full.inset(1), {105, 130, 238});
    body = full.inset(1);
  } else {
    if (state == ButtonState::Default) {
      p.outline(full, t.dark);
      body = full.inset(1);
    }
    if (pressed) {
      p.outline(body, t.dark);
      p.outline(body.inset(1), t.shadow);
    } else {
      raised(c, body);
    }
  }
  Rect cap = caption_box(c, body.inset(2), 0.4, 0.75);
  if (pressed) cap = {cap.x + 1, cap.y + 1, cap.w, cap.h};
  if (disabled) {
    Rng replay = c.rng;
    if (!c.xp()) p.glyphs({cap.x + 1, cap.y + 1, cap.w, cap.h}, t.highlight, replay);
    p.glyphs(cap, t.disabled_text, c.rng);
  } else {
    p.glyphs(cap, t.text, c.rng);
  }
}

enum class InputKind { Empty, Filled, Multiline };

void text_input(Ctx& c, InputKind kind) {
  Patch& p = c.p;
  const Theme& t = c.t;
  const Rect full = c.full();
  p.claim_rect(full, true);
  p.fill_rect(full, t.field);
  if (c.sketch()) {
    p.sketch_rect(full.inset(2), t.text, c.amp(c.h), c.rng);
  } else if (c.xp()) {
    p.outline(full, kXpField);
  } else {
    sunken(c, full);
  }
  const Rect inner = full.inset(c.sketch() ? 5 : 3);
  if (kind == InputKind::Filled) {
    const int th = std::clamp(inner.h / 2, 2, 7);
    const int tw = std::max(3, static_cast<int>(inner.w * c.rng.uniform(0.3, 0.9)));
    text(c, {inner.x + 1, inner.y + (inner.h - th) / 2, tw, th}, t.text);
  } else if (kind == InputKind::Multiline) {
    const int th = std::clamp(inner.h / 4, 3, 7);
    for (int y = inner.y + 1; y + th <= inner.bottom(); y += th + 4) {
      const int tw = std::max(3, static_cast<int>(inner.w * c.rng.uniform(0.4, 0.95)));
      text(c, {inner.x + 1, y, tw, th}, t.text);
    }
  }
}

// Checkbox and radio share the layout: indicator at the left, caption strip
// right of it. Both regions are owned; the gap between them is not.
Rect caption_strip(Ctx& c, int indicator) {
  const int x0 = indicator + 4;
  const int ch = std::clamp(indicator - 4, 3, 8);
  return {x0, (c.h - ch) / 2, c.w - x0, ch};
}

void checkbox(Ctx& c, bool checked) {
  Patch& p = c.p;
  const Theme& t = c.t;
  const int s = std::min(13, c.h);
  const Rect box{0, (c.h - s) / 2, s, s};
  const Rect cap = caption_strip(c, s);
  p.claim_rect(box, true);
  p.claim_rect(cap, true);
  p.fill_rect(cap, t.face);
  p.fill_rect(box, t.field);
  if (c.sketch()) {
    p.sketch_rect(box.inset(2), t.text, 1.0, c.rng);
    if (checked) {
      p.sketch_line(box.x + 3, box.y + 3, box.right() - 3, box.bottom() - 3, t.text, 0.5, c.rng);
      p.sketch_line(box.right() - 3, box.y + 3, box.x + 3, box.bottom() - 3, t.text, 0.5, c.rng);
    }
    p.scribble(cap, t.text, c.rng);
    return;
  }
  if (c.xp()) {
    p.outline(box, kXpControl);
  } else {
    sunken(c, box);
  }
  if (checked) {
    const Rgb ink = c.xp() ? kXpCheck : t.text;
    const double x0 = box.x + 3, y0 = box.y + s / 2.0 - 1;
    const double xm = box.x + s / 2.0 - 1, ym = box.bottom() - 4;
    const double x1 = box.right() - 4, y1 = box.y + 3;
    p.line(x0, y0, xm, ym, ink, 2);
    p.line(xm, ym, x1, y1, ink, 2);
  }
  p.glyphs(cap, t.text, c.rng);
}

void radio(Ctx& c, bool selected) {
  Patch& p = c.p;
  const Theme& t = c.t;
  const int d = std::min(12, c.h);
  const double cx = d / 2.0, cy = c.h / 2.0, r = d / 2.0;
  const Rect cap = caption_strip(c, d);
  p.claim_disc(cx, cy, r, true);
  p.claim_rect(cap, true);
  p.fill_rect(cap, t.face);
  if (c.sketch()) {
    p.fill_disc(cx, cy, r, t.field);
    p.sketch_circle(cx, cy, r - 2.0, t.text, 1.0, c.rng);
    if (selected) p.fill_disc(cx, cy, r / 3.0, t.text);
    p.scribble(cap, t.text, c.rng);
    return;
  }
  for (int y = 0; y < c.h; ++y)
    for (int x = 0; x < d; ++x) {
      const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
      const double dist = std::sqrt(dx * dx + dy * dy);
      if (dist > r) continue;
      const bool upper_left = dx + dy < 0;
      Rgb col = t.field;
      if (c.xp()) {
        if (dist > r - 1.2) col = kXpControl;
      } else if (dist > r - 1.5) {
        col = upper_left ? t.shadow : t.highlight;
      } else if (dist > r - 2.5) {
        col = upper_left ? t.dark : t.light;
      }
      p.pixel(x, y, col);
    }
  if (selected) p.fill_disc(cx, cy, r / 3.0, c.xp() ? kXpCheck : t.text);
  p.glyphs(cap, t.text, c.rng);
}

void dropdown(Ctx& c, bool enabled) {
  Patch& p = c.p;
  const Theme& t = c.t;
  const Rect full = c.full();
  p.claim_rect(full, true);
  const int bw = std::max(6, std::min(c.h - 4, c.w / 3));
  if (c.sketch()) {
    p.fill_rect(full, t.field);
    p.sketch_rect(full.inset(2), t.text, c.amp(c.h), c.rng);
    const double xs = c.w - 3 - bw;
    p.sketch_line(xs, 3, xs, c.h - 3, t.text, 1.0, c.rng);
    sketch_arrow(c, {c.w - 3 - bw, 2, bw, c.h - 4}, 1);
    const Rect inner{5, 5, c.w - bw - 10, c.h - 10};
    if (enabled && inner.w > 3) p.scribble(caption_box(c, inner, 0.5, 0.9), t.text, c.rng);
    else if (inner.w > 3) p.scribble(caption_box(c, inner, 0.5, 0.9), t.disabled_text, c.rng);
    return;
  }
  p.fill_rect(full, enabled ? t.field : t.face);
  Rect btn;
  if (c.xp()) {
    p.outline(full, kXpField);
    btn = {c.w - 1 - bw, 1, bw, c.h - 2};
    p.gradient_v(btn, {193, 211, 251}, {155, 185, 245});
    arrow(p, btn, 1, enabled ? kXpArrow : t.disabled_text);
  } else {
    sunken(c, full);
    btn = {c.w - 2 - bw, 2, bw, c.h - 4};
    p.fill_rect(btn, t.face);
    raised(c, btn);
    arrow(p, btn, 1, enabled ? t.text : t.disabled_text);
  }
  const Rect inner{3, 3, btn.x - 5, c.h - 6};
  if (inner.w > 3) {
    const int th = std::clamp(inner.h / 2, 2, 7);
    const int tw = std::max(3, static_cast<int>(inner.w * c.rng.uniform(0.4, 0.9)));
    p.glyphs({inner.x + 1, inner.y + (inner.h - th) / 2, tw, th}, enabled ? t.text : t.disabled_text,
             c.rng);
  }
}

void list_or_table(Ctx& c, bool table) {
  Patch& p = c.p;
  const Theme& t = c.t;
  const Rect full = c.full();
  p.claim_rect(full, true);
  p.fill_rect(full, t.field);
  if (c.sketch()) {
    p.sketch_rect(full.inset(2), t.text, t.wobble, c.rng);
  } else if (c.xp()) {
    p.outline(full, kXpField);
  } else {
    sunken(c, full);
  }
  const Rect inner = full.inset(c.sketch() ? 4 : 2);
  const int rh = 12;
  int y0 = inner.y + 1;
  std::vector<int> cols{inner.x};
  if (table) {
    const int hh = std::min(14, std::max(6, inner.h / 3));
    const int ncols = std::clamp(inner.w / 30, 1, 4);
    for (int i = 1; i < ncols; ++i) cols.push_back(inner.x + inner.w * i / ncols);
    cols.push_back(inner.right());
    for (std::size_t i = 0; i + 1 < cols.size(); ++i) {
      const Rect cell{cols[i], inner.y, cols[i + 1] - cols[i], hh};
      if (c.sketch()) {
        if (i > 0) p.sketch_line(cell.x, inner.y, cell.x, inner.bottom(), t.text, 1.0, c.rng);
      } else {
        if (c.xp()) {
          p.gradient_v(cell, {255, 255, 255}, {235, 234, 219});
          p.vline(cell.right() - 1, cell.y + 2, cell.bottom() - 3, t.shadow);
        } else {
          p.fill_rect(cell, t.face);
          raised(c, cell);
        }
        if (i > 0) p.vline(cell.x, inner.y + hh, inner.bottom() - 1, t.light);
      }
      const Rect cap = caption_box(c, cell.inset(2), 0.3, 0.7);
      text(c, cap, t.text, true);
    }
    if (c.sketch()) p.sketch_line(inner.x, inner.y + hh, inner.right(), inner.y + hh, t.text, 1.0, c.rng);
    y0 = inner.y + hh + 1;
  } else {
    cols.push_back(inner.right());
  }
  const int rows = std::max(0, (inner.bottom() - y0) / rh);
  const int selected = rows > 0 ? c.rng.uniform_int(-1, rows - 1) : -1;
  for (int row = 0; row < rows; ++row) {
    const int y = y0 + row * rh;
    const bool sel = row == selected && !c.sketch();
    if (sel) p.fill_rect({inner.x, y, inner.w, rh}, t.selection);
    if (table && !c.sketch()) p.hline(inner.x, inner.right() - 1, y + rh - 1, t.light);
    for (std::size_t i = 0; i + 1 < cols.size(); ++i) {
      const int cw = cols[i + 1] - cols[i] - 4;
      if (cw < 3) continue;
      const int tw = std::max(3, static_cast<int>(cw * c.rng.uniform(0.3, 0.9)));
      text(c, {cols[i] + 2, y + 3, tw, rh - 6}, sel ? t.highlight : t.text);
    }
  }
}

void label(Ctx& c, bool heading) {
  Patch& p = c.p;
  const Theme& t = c.t;
  const Rect full = c.full();
  p.claim_rect(full, true);
  p.fill_rect(full, t.face);
  if (heading) {
    text(c, full.inset(1), t.text, true);
    return;
  }
  const int rh = std::min(c.h, 7);
  for (int y = 0; y + rh <= c.h; y += rh + 3) {
    text(c, {0, y, c.w, rh}, t.text);
  }
}

void scrollbar(Ctx& c, bool vertical) {
  Patch& p = c.p;
  const Theme& t = c.t;
  const Rect full = c.full();
  p.claim_rect(full, true);
  const int across = vertical ? c.w : c.h;
  const int along = vertical ? c.h : c.w;
  auto seg = [&](int u0, int len) {
    return vertical ? Rect{0, u0, c.w, len} : Rect{u0, 0, len, c.h};
  };
  const int a = std::min(across, along / 3);
  const Rect first = seg(0, a), last = seg(along - a, a);
  const int track_len = along - 2 * a;
  const int thumb_len = std::max(6, static_cast<int>(track_len * c.rng.uniform(0.15, 0.5)));
  const int thumb_pos = a + c.rng.uniform_int(0, std::max(0, track_len - thumb_len));
  const Rect thumb = seg(thumb_pos, std::min(thumb_len, track_len));
  const int dir_first = vertical ? 0 : 2, dir_last = vertical ? 1 : 3;
  if (c.sketch()) {
    p.fill_rect(full, t.face);
    const double amp = std::min(t.wobble, 1.0);
    p.sketch_rect(full.inset(1), t.text, amp, c.rng);
    sketch_arrow(c, first, dir_first);
    sketch_arrow(c, last, dir_last);
    p.sketch_rect(thumb.inset(2), t.text, 0.5, c.rng);
    return;
  }
  if (c.xp()) {
    p.fill_rect(full, {243, 241, 236});
    for (const Rect& r : {first, last, thumb}) {
      p.gradient_v(r, {201, 215, 252}, {169, 193, 247});
      p.outline(r, {120, 150, 220});
    }
    arrow(p, first, dir_first, kXpArrow);
    arrow(p, last, dir_last, kXpArrow);
    return;
  }
  for (int y = 0; y < c.h; ++y)
    for (int x = 0; x < c.w; ++x) p.pixel(x, y, (x + y) % 2 ? t.highlight : t.face);
  for (const Rect& r : {first, last, thumb}) {
    p.fill_rect(r, t.face);
    raised(c, r);
  }
  arrow(p, first, dir_first, t.text);
  arrow(p, last, dir_last, t.text);
}

void icon(Ctx& c, bool picture) {
  Patch& p = c.p;
  const Theme& t = c.t;
  const double w = c.w, h = c.h;
  if (picture) {
    const int rr = std::max(2, std::min(c.w, c.h) / 5);
    p.claim_rect(c.full(), true);
    // Rounded rectangle: drop the pixels outside each corner's quarter circle.
    for (int y = 0; y < c.h; ++y)
      for (int x = 0; x < c.w; ++x) {
        const double qx = x < rr ? rr - (x + 0.5) : (x >= c.w - rr ? (x + 0.5) - (c.w - rr) : 0.0);
        const double qy = y < rr ? rr - (y + 0.5) : (y >= c.h - rr ? (y + 0.5) - (c.h - rr) : 0.0);
        if (qx > 0 && qy > 0 && qx * qx + qy * qy > double(rr) * rr) p.release(x, y);
      }
    const Points hill{{0, h}, {w * 0.35, h * 0.45}, {w * 0.6, h * 0.7}, {w * 0.8, h * 0.5}, {w, h}};
    if (c.sketch()) {
      p.fill_rect(c.full(), t.face);
      p.sketch_rect(c.full().inset(2), t.text, 1.0, c.rng);
      for (std::size_t i = 1; i + 1 < hill.size(); ++i) {
        p.sketch_line(hill[i - 1].first + 2, hill[i - 1].second - 2, hill[i].first, hill[i].second,
                      t.text, 0.5, c.rng);
      }
      p.sketch_circle(w * 0.72, h * 0.28, std::max(1.5, h / 9), t.text, 0.5, c.rng);
      return;
    }
    p.gradient_v(c.full(), {120, 170, 230}, {200, 225, 250});
    p.fill_polygon(hill, {60, 140, 60});
    p.fill_disc(w * 0.72, h * 0.28, std::max(1.5, h / 9), {250, 220, 60});
    return;
  }
  const int shape = c.rng.uniform_int(0, 2);
  static constexpr Rgb kPalette[] = {{200, 40, 40}, {40, 120, 200}, {230, 180, 30}, {60, 160, 70}, {150, 70, 180}};
  const Rgb fill = kPalette[c.rng.uniform_int(0, 4)];
  const Rgb edge = c.sketch() ? t.text : t.dark;
  Points pts;
  if (shape == 1) {
    pts = {{w / 2, 0}, {w, h / 2}, {w / 2, h}, {0, h / 2}};
  } else if (shape == 2) {
    pts = {{w / 2, 0}, {w, h}, {0, h}};
  }
  if (pts.empty()) {
    const double r = std::min(w, h) / 2.0;
    p.claim_disc(w / 2, h / 2, r, true);
    p.fill_disc(w / 2, h / 2, r, c.sketch() ? t.face : edge);
    if (c.sketch()) {
      p.sketch_circle(w / 2, h / 2, r - 2.0, t.text, 1.0, c.rng);
    } else {
      p.fill_disc(w / 2, h / 2, r - 1.0, fill);
    }
    return;
  }
  p.claim_polygon(pts, true);
  p.fill_polygon(pts, c.sketch() ? t.face : fill);
  // Edges pulled toward the centroid so they land on owned pixels.
  double mx = 0, my = 0;
  for (const auto& [x, y] : pts) {
    mx += x / pts.size();
    my += y / pts.size();
  }
  Points in;
  for (const auto& [x, y] : pts) {
    const double dx = mx - x, dy = my - y, len = std::hypot(dx, dy);
    const double pull = c.sketch() ? 3.0 : 1.0;
    in.push_back({x + dx / len * pull, y + dy / len * pull});
  }
  for (std::size_t i = 0; i < in.size(); ++i) {
    const auto [x0, y0] = in[i];
    const auto [x1, y1] = in[(i + 1) % in.size()];
    if (c.sketch()) {
      p.sketch_line(x0, y0, x1, y1, edge, 1.0, c.rng);
    } else {
      p.line(x0, y0, x1, y1, edge);
    }
  }
}

}  // namespace

SizeRange size_range(int fine_id) {
  switch (fine_id) {
    case 1: case 2: return {60, 640, 48, 480};
    case 3: case 4: case 5: case 6: return {24, 160, 14, 40};
    case 7: case 8: return {30, 260, 14, 28};
    case 9: return {40, 260, 28, 160};
    case 10: case 11: case 12: case 13: return {24, 160, 10, 24};
    case 14: case 15: return {40, 220, 14, 26};
    case 16: case 17: return {40, 300, 32, 240};
    case 18: case 19: return {12, 200, 6, 20};
    case 20: return {10, 18, 32, 300};
    case 21: return {32, 300, 10, 18};
    case 22: case 23: return {12, 48, 12, 48};
    default: break;
  }
  throw ConfigError("no widget is rendered for fine class " + std::to_string(fine_id));
}

Patch render_widget(int fine_id, const Theme& theme, int w, int h, std::uint64_t style_seed) {
  const SizeRange range = size_range(fine_id);
  if (!range.admits(w, h)) {
    throw ConfigError(std::string("widget ") + taxonomy()[static_cast<std::size_t>(fine_id)].name +
                      ": size " + std::to_string(w) + "x" + std::to_string(h) + " outside [" +
                      std::to_string(range.min_w) + "," + std::to_string(range.max_w) + "]x[" +
                      std::to_string(range.min_h) + "," + std::to_string(range.max_h) + "]");
  }
  Patch patch(w, h);
  Rng rng(style_seed);
  Ctx c{patch, theme, rng, w, h};
  switch (fine_id) {
    case 1: window(c, true); break;
    case 2: window(c, false); break;
    case 3: button(c, ButtonState::Normal); break;
    case 4: button(c, ButtonState::Pressed); break;
    case 5: button(c, ButtonState::Default); break;
    case 6: button(c, ButtonState::Disabled); break;
    case 7: text_input(c, InputKind::Empty); break;
    case 8: text_input(c, InputKind::Filled); break;
    case 9: text_input(c, InputKind::Multiline); break;
    case 10: checkbox(c, false); break;
    case 11: checkbox(c, true); break;
    case 12: radio(c, false); break;
    case 13: radio(c, true); break;
    case 14: dropdown(c, true); break;
    case 15: dropdown(c, false); break;
    case 16: list_or_table(c, false); break;
    case 17: list_or_table(c, true); break;
    case 18: label(c, false); break;
    case 19: label(c, true); break;
    case 20: scrollbar(c, true); break;
    case 21: scrollbar(c, false); break;
    case 22: icon(c, false); break;
    case 23: icon(c, true); break;
    default: break;
  }
  return patch;
}

}  // namespace cloudifier::scene
