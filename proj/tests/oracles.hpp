#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "cloudifier/scene/render.hpp"
#include "cloudifier/scene/scene.hpp"

namespace cloudifier::test {

// Re-composes an observation from its widget list: owned pixels of each
// widget in z-order take its provisional id, painted-but-unowned pixels clear
// it. Returns the provisional map (z + 1, 0 = background).
inline std::vector<int> pixel_scan(const scene::Observation& obs) {
  const scene::Theme& th = scene::theme(obs.theme);
  const int h = obs.height(), w = obs.width();
  std::vector<int> map(static_cast<std::size_t>(h) * w, 0);
  for (std::size_t z = 0; z < obs.widgets.size(); ++z) {
    const scene::WidgetInstance& wi = obs.widgets[z];
    const scene::Rect& r = wi.placement;
    const scene::Patch patch = scene::render_widget(wi.fine_id, th, r.w, r.h, wi.style_seed);
    for (int py = 0; py < r.h; ++py)
      for (int px = 0; px < r.w; ++px) {
        const int x = r.x + px, y = r.y + py;
        if (x < 0 || y < 0 || x >= w || y >= h || !patch.painted(px, py)) continue;
        map[static_cast<std::size_t>(y) * w + x] = patch.owned(px, py) ? static_cast<int>(z) + 1 : 0;
      }
  }
  return map;
}

// Compares labels, instance ids, widget ids and the scene label of `obs`
// with the pixel scan. Returns an empty string when everything agrees.
inline std::string scan_disagreement(const scene::Observation& obs) {
  const std::vector<int> scan = pixel_scan(obs);
  std::map<int, int> id_of;  // provisional z + 1 -> stored instance id
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const int z1 = scan[i];
    const int id = obs.instance_map[i];
    if ((z1 == 0) != (id == 0)) return "instance presence differs at pixel " + std::to_string(i);
    if (z1 == 0) {
      if (obs.labels[i] != 0) return "label on a background pixel " + std::to_string(i);
      continue;
    }
    auto [it, fresh] = id_of.emplace(z1, id);
    if (!fresh && it->second != id) return "one widget carries two ids";
    if (obs.labels[i] != obs.widgets[static_cast<std::size_t>(z1 - 1)].label) {
      return "label differs from the owning widget at pixel " + std::to_string(i);
    }
  }
  int next_id = 0;
  for (std::size_t z = 0; z < obs.widgets.size(); ++z) {
    const auto it = id_of.find(static_cast<int>(z) + 1);
    if (it == id_of.end()) {
      if (obs.widgets[z].id != 0) return "hidden widget " + std::to_string(z) + " has an id";
      continue;
    }
    ++next_id;
    if (obs.widgets[z].id != next_id || it->second != next_id) return "ids are not 1..m in z-order";
  }
  std::set<std::uint16_t> ids(obs.instance_map.begin(), obs.instance_map.end());
  ids.erase(0);
  if (ids.size() != static_cast<std::size_t>(next_id)) return "instance map has unexplained ids";
  // Scene label: class of the largest visible widget, earliest on ties.
  std::vector<std::size_t> area(obs.widgets.size() + 1, 0);
  for (int z1 : scan) ++area[static_cast<std::size_t>(z1)];
  int label = 0;
  std::size_t best = 0;
  for (std::size_t z = 0; z < obs.widgets.size(); ++z) {
    if (area[z + 1] > best) {
      best = area[z + 1];
      label = obs.widgets[z].label;
    }
  }
  if (obs.scene_label != label) return "scene label differs";
  return {};
}

struct CenterTally {
  int considered = 0;
  int consistent = 0;
};

// Moves the center pixel of every widget that owns it through the forward
// map p' = c + R (p - c) + t about the image center c, where a positive angle
// turns the picture counter-clockwise on screen (y down), so
// R = [[cos, sin], [-sin, cos]]. Counts centers landing at least `margin`
// pixels inside the output and whether the output label there matches.
inline void tally_widget_centers(const scene::Observation& src, const scene::Observation& out,
                                 double rotation_deg, double tx, double ty, CenterTally& tally,
                                 double margin = 5.0) {
  const double theta = rotation_deg * std::numbers::pi / 180.0;
  const double cs = std::cos(theta), sn = std::sin(theta);
  const int h = src.height(), w = src.width();
  const double cx = w / 2.0, cy = h / 2.0;
  for (const auto& wi : src.widgets) {
    if (wi.id == 0) continue;
    const int px = wi.bbox.x + wi.bbox.w / 2, py = wi.bbox.y + wi.bbox.h / 2;
    if (src.instance_map[static_cast<std::size_t>(py) * w + px] != wi.id) continue;
    const double u = px + 0.5 - cx, v = py + 0.5 - cy;
    const double xt = cx + cs * u + sn * v + tx;
    const double yt = cy - sn * u + cs * v + ty;
    if (xt < margin || yt < margin || xt > w - margin || yt > h - margin) continue;
    ++tally.considered;
    const std::size_t o = static_cast<std::size_t>(std::floor(yt)) * w + static_cast<std::size_t>(std::floor(xt));
    if (out.labels[o] == wi.label) ++tally.consistent;
  }
}

}  // namespace cloudifier::test
