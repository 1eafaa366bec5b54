#include "cloudifier/scene/canvas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cloudifier::scene {

Rect Rect::intersect(const Rect& o) const {
  const int x0 = std::max(x, o.x);
  const int y0 = std::max(y, o.y);
  const int x1 = std::min(right(), o.right());
  const int y1 = std::min(bottom(), o.bottom());
  if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
  return {x0, y0, x1 - x0, y1 - y0};
}

Image::Image(int h, int w, Rgb fill) : height(h), width(w), px(static_cast<std::size_t>(h) * w * 3) {
  for (std::size_t i = 0; i < px.size(); i += 3) {
    px[i] = fill.r;
    px[i + 1] = fill.g;
    px[i + 2] = fill.b;
  }
}

Patch::Patch(int w, int h)
    : image(h, w), paint(static_cast<std::size_t>(w) * h, 0), own(static_cast<std::size_t>(w) * h, 0) {}

std::size_t Patch::owned_count() const {
  return static_cast<std::size_t>(std::count(own.begin(), own.end(), std::uint8_t{1}));
}

void Patch::mark(int x, int y, bool owned) {
  if (!in(x, y)) return;
  paint[idx(x, y)] = 1;
  own[idx(x, y)] = owned ? 1 : 0;
}

void Patch::release(int x, int y) {
  if (!in(x, y)) return;
  paint[idx(x, y)] = 0;
  own[idx(x, y)] = 0;
}

void Patch::claim_rect(const Rect& r, bool owned) {
  const Rect c = r.intersect({0, 0, width(), height()});
  for (int y = c.y; y < c.bottom(); ++y)
    for (int x = c.x; x < c.right(); ++x) mark(x, y, owned);
}

void Patch::claim_disc(double cx, double cy, double radius, bool owned) {
  for (int y = 0; y < height(); ++y)
    for (int x = 0; x < width(); ++x) {
      const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
      if (dx * dx + dy * dy <= radius * radius) mark(x, y, owned);
    }
}

namespace {

bool inside_polygon(const std::vector<std::pair<double, double>>& pts, double px, double py) {
  bool inside = false;
  for (std::size_t i = 0, j = pts.size() - 1; i < pts.size(); j = i++) {
    const auto [xi, yi] = pts[i];
    const auto [xj, yj] = pts[j];
    if ((yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi) inside = !inside;
  }
  return inside;
}

}  // namespace

void Patch::claim_polygon(const std::vector<std::pair<double, double>>& pts, bool owned) {
  for (int y = 0; y < height(); ++y)
    for (int x = 0; x < width(); ++x)
      if (inside_polygon(pts, x + 0.5, y + 0.5)) mark(x, y, owned);
}

void Patch::fill_rect(const Rect& r, Rgb c) {
  const Rect k = r.intersect({0, 0, width(), height()});
  for (int y = k.y; y < k.bottom(); ++y)
    for (int x = k.x; x < k.right(); ++x) pixel(x, y, c);
}

namespace {

Rgb lerp(Rgb a, Rgb b, double t) {
  auto mix = [t](std::uint8_t u, std::uint8_t v) {
    return static_cast<std::uint8_t>(std::lround(u + (v - u) * t));
  };
  return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

}  // namespace

void Patch::gradient_h(const Rect& r, Rgb a, Rgb b) {
  for (int x = r.x; x < r.right(); ++x) {
    const double t = r.w > 1 ? double(x - r.x) / (r.w - 1) : 0.0;
    fill_rect({x, r.y, 1, r.h}, lerp(a, b, t));
  }
}

void Patch::gradient_v(const Rect& r, Rgb a, Rgb b) {
  for (int y = r.y; y < r.bottom(); ++y) {
    const double t = r.h > 1 ? double(y - r.y) / (r.h - 1) : 0.0;
    fill_rect({r.x, y, r.w, 1}, lerp(a, b, t));
  }
}

void Patch::hline(int x0, int x1, int y, Rgb c) {
  for (int x = x0; x <= x1; ++x) pixel(x, y, c);
}

void Patch::vline(int x, int y0, int y1, Rgb c) {
  for (int y = y0; y <= y1; ++y) pixel(x, y, c);
}

void Patch::line(double x0, double y0, double x1, double y1, Rgb c, int thickness) {
  const double len = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
  const int steps = static_cast<int>(std::ceil(len));
  for (int i = 0; i <= steps; ++i) {
    const double t = steps == 0 ? 0.0 : double(i) / steps;
    const int x = static_cast<int>(std::floor(x0 + (x1 - x0) * t));
    const int y = static_cast<int>(std::floor(y0 + (y1 - y0) * t));
    for (int dy = 0; dy < thickness; ++dy)
      for (int dx = 0; dx < thickness; ++dx) pixel(x + dx, y + dy, c);
  }
}

void Patch::outline(const Rect& r, Rgb c) {
  if (r.empty()) return;
  hline(r.x, r.right() - 1, r.y, c);
  hline(r.x, r.right() - 1, r.bottom() - 1, c);
  vline(r.x, r.y, r.bottom() - 1, c);
  vline(r.right() - 1, r.y, r.bottom() - 1, c);
}

void Patch::bevel(const Rect& r, Rgb outer_tl, Rgb outer_br, Rgb inner_tl, Rgb inner_br) {
  auto frame = [this](const Rect& f, Rgb tl, Rgb br) {
    if (f.w <= 0 || f.h <= 0) return;
    hline(f.x, f.right() - 1, f.y, tl);
    vline(f.x, f.y, f.bottom() - 1, tl);
    hline(f.x, f.right() - 1, f.bottom() - 1, br);
    vline(f.right() - 1, f.y, f.bottom() - 1, br);
  };
  frame(r, outer_tl, outer_br);
  frame(r.inset(1), inner_tl, inner_br);
}

void Patch::fill_disc(double cx, double cy, double radius, Rgb c) {
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
  const int y1 = std::min(height() - 1, static_cast<int>(std::ceil(cy + radius)));
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
  const int x1 = std::min(width() - 1, static_cast<int>(std::ceil(cx + radius)));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
      if (dx * dx + dy * dy <= radius * radius) pixel(x, y, c);
    }
}

void Patch::fill_polygon(const std::vector<std::pair<double, double>>& pts, Rgb c) {
  for (int y = 0; y < height(); ++y)
    for (int x = 0; x < width(); ++x)
      if (inside_polygon(pts, x + 0.5, y + 0.5)) pixel(x, y, c);
}

void Patch::sketch_line(double x0, double y0, double x1, double y1, Rgb c, double amp, Rng& rng) {
  const double dx = x1 - x0, dy = y1 - y0;
  const double len = std::hypot(dx, dy);
  if (len <= 0.0) {
    pixel(static_cast<int>(x0), static_cast<int>(y0), c);
    return;
  }
  const double nx = -dy / len, ny = dx / len;
  const double a = amp * rng.uniform(0.3, 0.6);
  const double walk_bound = amp - a;
  const double period = rng.uniform(12.0, 30.0);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  double walk = 0.0;
  const int steps = static_cast<int>(std::ceil(len * 1.5));
  for (int i = 0; i <= steps; ++i) {
    const double t = double(i) / steps;
    walk = std::clamp(walk + rng.uniform(-0.3, 0.3), -walk_bound, walk_bound);
    const double off = a * std::sin(2.0 * std::numbers::pi * t * len / period + phase) + walk;
    const double px = x0 + dx * t + nx * off;
    const double py = y0 + dy * t + ny * off;
    pixel(static_cast<int>(std::floor(px)), static_cast<int>(std::floor(py)), c);
  }
}

void Patch::sketch_rect(const Rect& r, Rgb c, double amp, Rng& rng) {
  const double x0 = r.x + 0.5, y0 = r.y + 0.5;
  const double x1 = r.right() - 0.5, y1 = r.bottom() - 0.5;
  sketch_line(x0, y0, x1, y0, c, amp, rng);
  sketch_line(x1, y0, x1, y1, c, amp, rng);
  sketch_line(x1, y1, x0, y1, c, amp, rng);
  sketch_line(x0, y1, x0, y0, c, amp, rng);
}

void Patch::sketch_circle(double cx, double cy, double radius, Rgb c, double amp, Rng& rng) {
  const double a = amp * rng.uniform(0.2, 0.5);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const int lobes = rng.uniform_int(2, 4);
  const int steps = std::max(16, static_cast<int>(2.0 * std::numbers::pi * radius * 2.0));
  for (int i = 0; i <= steps; ++i) {
    const double th = 2.0 * std::numbers::pi * i / steps;
    const double r = radius + a * std::sin(lobes * th + phase);
    pixel(static_cast<int>(std::floor(cx + r * std::cos(th))),
          static_cast<int>(std::floor(cy + r * std::sin(th))), c);
  }
}

void Patch::glyphs(const Rect& area, Rgb c, Rng& rng, bool bold) {
  if (area.empty()) return;
  if (area.h < 3) {
    hline(area.x, area.right() - 1, area.y + area.h / 2, c);
    return;
  }
  const int top = area.y, bottom = area.bottom() - 1, mid = area.y + area.h / 2;
  int x = area.x;
  while (x < area.right()) {
    if (x > area.x && rng.bernoulli(0.18)) {
      x += rng.uniform_int(2, 4);
      continue;
    }
    const int cw = rng.uniform_int(2, 4) + (bold ? 1 : 0);
    if (x + cw > area.right()) break;
    const int x1 = x + cw - 1;
    const int pattern = rng.uniform_int(1, 31);
    int strokes = 0;
    if (pattern & 1) { vline(x, top, bottom, c); ++strokes; }
    if (pattern & 2) { vline(x1, top, bottom, c); ++strokes; }
    if (pattern & 4) { hline(x, x1, top, c); ++strokes; }
    if (pattern & 8) { hline(x, x1, mid, c); ++strokes; }
    if (pattern & 16) { hline(x, x1, bottom, c); ++strokes; }
    if (strokes < 2) vline(x, top, bottom, c);
    if (bold) vline(x + 1, top, bottom, c);
    x += cw + 1;
  }
}

void Patch::scribble(const Rect& area, Rgb c, Rng& rng) {
  if (area.empty()) return;
  const double cy = area.y + area.h / 2.0;
  const double amp = std::max(0.5, area.h / 2.0 - 1.0);
  const double period = rng.uniform(4.0, 8.0);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  double px = area.x, py = cy;
  for (int x = area.x; x < area.right(); ++x) {
    const double y = cy + amp * std::sin(2.0 * std::numbers::pi * (x - area.x) / period + phase);
    line(px, py, x, y, c);
    px = x;
    py = y;
  }
}

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t n, std::uint64_t h) {
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace cloudifier::scene
