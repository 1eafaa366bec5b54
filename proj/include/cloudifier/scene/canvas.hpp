#pragma once

#include <cstdint>
#include <vector>

#include "cloudifier/rng.hpp"
#include "cloudifier/scene/theme.hpp"

namespace cloudifier::scene {

struct Rect {
  int x = 0, y = 0, w = 0, h = 0;

  int right() const { return x + w; }
  int bottom() const { return y + h; }
  bool empty() const { return w <= 0 || h <= 0; }
  bool contains(int px, int py) const { return px >= x && px < right() && py >= y && py < bottom(); }
  Rect intersect(const Rect& o) const;
  Rect inset(int d) const { return {x + d, y + d, w - 2 * d, h - 2 * d}; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

// Interleaved 8-bit RGB, row-major.
struct Image {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> px;

  Image() = default;
  Image(int h, int w, Rgb fill = {});
  Rgb at(int y, int x) const {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    return {px[i], px[i + 1], px[i + 2]};
  }
  void set(int y, int x, Rgb c) {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    px[i] = c.r;
    px[i + 1] = c.g;
    px[i + 2] = c.b;
  }
  friend bool operator==(const Image&, const Image&) = default;
};

// A rendered widget. `paint` marks the pixels the widget draws; `own` the
// subset it is labelled on. A window paints its client area without owning
// it, so the client area is background in the label maps.
//
// Regions are claimed first; drawing calls then only touch painted pixels.
class Patch {
 public:
  Patch(int w, int h);

  int width() const { return image.width; }
  int height() const { return image.height; }
  bool painted(int x, int y) const { return in(x, y) && paint[idx(x, y)] != 0; }
  bool owned(int x, int y) const { return in(x, y) && own[idx(x, y)] != 0; }
  std::size_t owned_count() const;

  void claim_rect(const Rect& r, bool owned);
  void claim_disc(double cx, double cy, double radius, bool owned);
  void claim_polygon(const std::vector<std::pair<double, double>>& pts, bool owned);
  void release(int x, int y);

  void pixel(int x, int y, Rgb c) {
    if (painted(x, y)) image.set(y, x, c);
  }
  void fill_rect(const Rect& r, Rgb c);
  void gradient_h(const Rect& r, Rgb a, Rgb b);
  void gradient_v(const Rect& r, Rgb a, Rgb b);
  void hline(int x0, int x1, int y, Rgb c);
  void vline(int x, int y0, int y1, Rgb c);
  void line(double x0, double y0, double x1, double y1, Rgb c, int thickness = 1);
  void outline(const Rect& r, Rgb c);
  // Two-pixel frame: outer top-left/bottom-right colors, then inner.
  void bevel(const Rect& r, Rgb outer_tl, Rgb outer_br, Rgb inner_tl, Rgb inner_br);
  void fill_disc(double cx, double cy, double radius, Rgb c);
  void fill_polygon(const std::vector<std::pair<double, double>>& pts, Rgb c);

  // Hand-drawn stroke: each sample is displaced perpendicular to the segment
  // by a sinusoid plus a random walk, never more than `amp` pixels.
  void sketch_line(double x0, double y0, double x1, double y1, Rgb c, double amp, Rng& rng);
  void sketch_rect(const Rect& r, Rgb c, double amp, Rng& rng);
  void sketch_circle(double cx, double cy, double radius, Rgb c, double amp, Rng& rng);

  // Pseudo-text: runs of blocky glyphs filling `area` left to right.
  void glyphs(const Rect& area, Rgb c, Rng& rng, bool bold = false);
  // Sketch text: a wavy scribble across `area`.
  void scribble(const Rect& area, Rgb c, Rng& rng);

  Image image;
  std::vector<std::uint8_t> paint;
  std::vector<std::uint8_t> own;

 private:
  bool in(int x, int y) const { return x >= 0 && y >= 0 && x < width() && y < height(); }
  std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * width() + x; }
  void mark(int x, int y, bool owned);
};

// 64-bit FNV-1a; used for golden-render and determinism checks.
std::uint64_t fnv1a(const std::uint8_t* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace cloudifier::scene
