#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cloudifier/scene/canvas.hpp"
#include "cloudifier/scene/taxonomy.hpp"
#include "cloudifier/scene/theme.hpp"

namespace cloudifier::scene {

// A widget to draw. `rect` is in scene coordinates and may extend past the
// scene edges; the part outside is clipped.
struct WidgetPlacement {
  int fine_id = 0;
  Rect rect;
  std::uint64_t style_seed = 0;
};

struct WidgetInstance {
  int fine_id = 0;
  int label = 0;        // class id at the observation's granularity
  Rect placement;       // unclipped, scene coordinates
  Rect bbox;            // placement clipped to the scene
  int z_order = 0;      // index in draw order; later occludes earlier
  std::uint16_t id = 0; // value in instance_map, 0 when nothing stays visible
  std::uint64_t style_seed = 0;
  friend bool operator==(const WidgetInstance&, const WidgetInstance&) = default;
};

struct Observation {
  Image image;
  std::vector<std::uint16_t> labels;        // h*w class ids
  std::vector<std::uint16_t> instance_map;  // h*w, 0 = background
  std::uint16_t scene_label = 0;
  ThemeKind theme = ThemeKind::Win95;
  // Every drawn widget in z-order, including fully hidden ones (id 0).
  std::vector<WidgetInstance> widgets;

  int height() const { return image.height; }
  int width() const { return image.width; }
  std::size_t pixels() const { return labels.size(); }
  friend bool operator==(const Observation&, const Observation&) = default;
};

// Draws `widgets` in order over the theme's desktop colour. Visible instances
// are numbered 1..m in z-order; the scene label is the class of the widget
// covering the most pixels (earliest wins ties), or background.
Observation compose_scene(const std::vector<WidgetPlacement>& widgets, ThemeKind theme, int height,
                          int width, Granularity granularity);

struct ScenePolicy {
  int coarse_limit = 0;             // generate only coarse groups [0, limit); 0 = all
  double virtual_scale_max = 1.45;  // virtual screen side = size * U[1, max]
  int max_virtual = 1024;
};

// Lays out windows and widgets on a larger virtual screen and returns a
// random size x size crop of it.
Observation compose_random_scene(const ScenePolicy& policy, ThemeKind theme, int size,
                                 Granularity granularity, std::uint64_t seed);

struct GeneratorConfig {
  int count = 3072;
  int size = 352;
  ThemeKind theme = ThemeKind::Mixed;
  Granularity granularity = Granularity::Coarse;
  std::uint64_t seed = 0;
  int coarse_limit = 0;

  int num_classes() const { return scene::num_classes(granularity, coarse_limit); }
};

// Observation `index` of the batch; depends only on (config, index).
Observation generate_observation(const GeneratorConfig& config, std::uint64_t index);

struct MetaBatch {
  GeneratorConfig config;
  std::vector<Observation> observations;
};

MetaBatch generate_meta_batch(const GeneratorConfig& config);
// Generates observations one at a time, in index order, without keeping them.
void for_each_observation(const GeneratorConfig& config,
                          const std::function<void(std::uint64_t, Observation&&)>& fn);

}  // namespace cloudifier::scene
