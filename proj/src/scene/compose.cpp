#include "cloudifier/scene/scene.hpp"

#include <algorithm>
#include <cmath>

#include "cloudifier/common.hpp"
#include "cloudifier/rng.hpp"
#include "cloudifier/scene/render.hpp"

namespace cloudifier::scene {

Observation compose_scene(const std::vector<WidgetPlacement>& widgets, ThemeKind theme_kind, int height,
                          int width, Granularity granularity) {
  if (height <= 0 || width <= 0) throw ConfigError("compose_scene: scene size must be positive");
  if (widgets.size() >= 65535) throw ConfigError("compose_scene: too many widgets for 16-bit ids");
  const Theme& th = theme(theme_kind);
  const Rect bounds{0, 0, width, height};
  const std::size_t n = static_cast<std::size_t>(height) * width;

  Observation obs;
  obs.theme = theme_kind;
  obs.image = Image(height, width, th.desktop);
  obs.labels.assign(n, 0);
  obs.instance_map.assign(n, 0);

  // Draw with provisional ids z+1, renumber afterwards.
  for (std::size_t z = 0; z < widgets.size(); ++z) {
    const WidgetPlacement& wp = widgets[z];
    WidgetInstance inst;
    inst.fine_id = wp.fine_id;
    inst.label = project(wp.fine_id, granularity);
    inst.placement = wp.rect;
    inst.bbox = wp.rect.intersect(bounds);
    inst.z_order = static_cast<int>(z);
    inst.style_seed = wp.style_seed;
    obs.widgets.push_back(inst);
    if (inst.bbox.empty()) continue;

    const Patch patch = render_widget(wp.fine_id, th, wp.rect.w, wp.rect.h, wp.style_seed);
    const auto provisional = static_cast<std::uint16_t>(z + 1);
    for (int y = inst.bbox.y; y < inst.bbox.bottom(); ++y) {
      const int py = y - wp.rect.y;
      for (int x = inst.bbox.x; x < inst.bbox.right(); ++x) {
        const int px = x - wp.rect.x;
        if (!patch.painted(px, py)) continue;
        const std::size_t i = static_cast<std::size_t>(y) * width + x;
        obs.image.set(y, x, patch.image.at(py, px));
        const bool owned = patch.owned(px, py);
        obs.labels[i] = owned ? static_cast<std::uint16_t>(inst.label) : 0;
        obs.instance_map[i] = owned ? provisional : 0;
      }
    }
  }

  std::vector<std::size_t> area(widgets.size() + 1, 0);
  for (const std::uint16_t id : obs.instance_map) ++area[id];
  std::vector<std::uint16_t> remap(widgets.size() + 1, 0);
  std::uint16_t next = 1;
  std::size_t best_area = 0;
  for (std::size_t z = 0; z < widgets.size(); ++z) {
    if (area[z + 1] == 0) continue;
    remap[z + 1] = next;
    obs.widgets[z].id = next++;
    if (area[z + 1] > best_area) {
      best_area = area[z + 1];
      obs.scene_label = static_cast<std::uint16_t>(obs.widgets[z].label);
    }
  }
  for (auto& id : obs.instance_map) id = remap[id];
  return obs;
}

namespace {

int sample_extent(Rng& rng, int lo, int hi, int avail) {
  const int top = std::max(lo, std::min(hi, avail));
  return rng.uniform_int(lo, top);
}

}  // namespace

Observation compose_random_scene(const ScenePolicy& policy, ThemeKind theme_kind, int size,
                                 Granularity granularity, std::uint64_t seed) {
  if (size <= 0) throw ConfigError("compose_random_scene: size must be positive");
  const int limit = policy.coarse_limit == 0 ? coarse::Count : policy.coarse_limit;
  num_classes(granularity, policy.coarse_limit);  // validates the limit
  Rng rng(seed);
  const int side = std::max(
      size, std::min(policy.max_virtual,
                     static_cast<int>(std::lround(size * rng.uniform(1.0, std::max(1.0, policy.virtual_scale_max))))));

  std::vector<WidgetPlacement> placements;
  std::vector<Rect> clients;
  if (limit > coarse::WindowFrame) {
    const int windows = 1 + (rng.bernoulli(0.5) ? 1 : 0);
    const SizeRange wr = size_range(1);
    for (int i = 0; i < windows; ++i) {
      const int ww = rng.uniform_int(std::max(wr.min_w, side / 2), std::max(wr.min_w, std::min(wr.max_w, side)));
      const int wh = rng.uniform_int(std::max(wr.min_h, side / 2), std::max(wr.min_h, std::min(wr.max_h, side)));
      const Rect r{rng.uniform_int(0, std::max(0, side - ww)), rng.uniform_int(0, std::max(0, side - wh)), ww, wh};
      placements.push_back({rng.uniform_int(1, 2), r, rng.next()});
      // Conservative client area below the title bar.
      const int title = std::clamp(wh / 7, 12, 22) + 6;
      clients.push_back({r.x + 5, r.y + title, ww - 10, wh - title - 5});
    }
  } else {
    clients.push_back({0, 0, side, side});
  }

  std::vector<int> allowed;
  for (const auto& wc : taxonomy()) {
    if (wc.coarse_id > coarse::WindowFrame && wc.coarse_id < limit) allowed.push_back(wc.fine_id);
  }
  if (!allowed.empty()) {
    const int k = rng.uniform_int(3, std::max(6, side * side / 8000));
    for (int i = 0; i < k; ++i) {
      const int fine = allowed[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(allowed.size()) - 1))];
      const Rect& area = clients[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(clients.size()) - 1))];
      const SizeRange sr = size_range(fine);
      const int w = sample_extent(rng, sr.min_w, sr.max_w, static_cast<int>(area.w * 0.8));
      const int h = sample_extent(rng, sr.min_h, sr.max_h, static_cast<int>(area.h * 0.8));
      const int x = area.x + rng.uniform_int(0, std::max(0, area.w - w));
      const int y = area.y + rng.uniform_int(0, std::max(0, area.h - h));
      placements.push_back({fine, {x, y, w, h}, rng.next()});
    }
  }

  const int ox = rng.uniform_int(0, side - size);
  const int oy = rng.uniform_int(0, side - size);
  for (auto& p : placements) {
    p.rect.x -= ox;
    p.rect.y -= oy;
  }
  return compose_scene(placements, theme_kind, size, size, granularity);
}

}  // namespace cloudifier::scene
