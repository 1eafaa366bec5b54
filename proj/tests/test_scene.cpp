#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "cloudifier/common.hpp"
#include "cloudifier/scene/render.hpp"
#include "cloudifier/scene/scene.hpp"
#include "oracles.hpp"

using namespace cloudifier;
using namespace cloudifier::scene;

namespace {

// Golden render of an 80x24 win95 normal button (style seed 1): FNV-1a over
// the pixels followed by the ownership mask.
constexpr std::uint64_t kGoldenButton = 0x0f1689072bb894a5ULL;

std::uint64_t patch_hash(const Patch& p) {
  const std::uint64_t h = fnv1a(p.image.px.data(), p.image.px.size());
  return fnv1a(p.own.data(), p.own.size(), h);
}

void check_scan_agreement(const Observation& obs) { CHECK(test::scan_disagreement(obs) == ""); }

}  // namespace

TEST_SUITE("scene-synth") {

TEST_CASE("taxonomy table") {
  const auto& t = taxonomy();
  CHECK(num_coarse() == 11);
  CHECK(num_fine() == static_cast<int>(t.size()));
  CHECK(num_fine() > num_coarse());
  CHECK(t[0].coarse_id == 0);
  CHECK(t[0].fine_id == 0);
  CHECK(coarse_of(0) == coarse::Background);
  const char* names[] = {"background", "window-frame", "button", "text-input", "checkbox", "radio-button",
                         "dropdown", "list/table", "label/static-text", "scrollbar", "icon/image"};
  for (int c = 0; c < 11; ++c) CHECK(std::string(coarse_name(c)) == names[c]);
  std::vector<int> per_coarse(11, 0);
  int prev_coarse = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(t[i].fine_id == static_cast<int>(i));
    CHECK(t[i].coarse_id >= 0);
    CHECK(t[i].coarse_id < 11);
    CHECK(t[i].coarse_id >= prev_coarse);
    prev_coarse = t[i].coarse_id;
    ++per_coarse[static_cast<std::size_t>(t[i].coarse_id)];
    CHECK(coarse_of(t[i].fine_id) == t[i].coarse_id);
    CHECK(project(t[i].fine_id, Granularity::Coarse) == t[i].coarse_id);
    CHECK(project(t[i].fine_id, Granularity::Fine) == t[i].fine_id);
  }
  CHECK(per_coarse[0] == 1);
  for (int c = 1; c < 11; ++c) {
    CHECK(per_coarse[static_cast<std::size_t>(c)] >= 2);
    CHECK(per_coarse[static_cast<std::size_t>(c)] <= 4);
  }
  CHECK(num_classes(Granularity::Coarse) == 11);
  CHECK(num_classes(Granularity::Fine) == num_fine());
  CHECK(num_classes(Granularity::Coarse, 5) == 5);
  CHECK(num_classes(Granularity::Fine, 5) == 1 + per_coarse[1] + per_coarse[2] + per_coarse[3] + per_coarse[4]);
  CHECK_THROWS_AS(num_classes(Granularity::Coarse, 1), ConfigError);
  CHECK_THROWS_AS(num_classes(Granularity::Coarse, 12), ConfigError);
  CHECK(parse_granularity("fine") == Granularity::Fine);
  CHECK_THROWS_AS(parse_granularity("medium"), ConfigError);
}

TEST_CASE("themes") {
  CHECK(parse_theme_kind("winxp") == ThemeKind::WinXp);
  CHECK_THROWS_AS(parse_theme_kind("aqua"), ConfigError);
  for (std::uint64_t i = 0; i < 8; ++i) CHECK(static_cast<int>(theme_for_index(ThemeKind::Mixed, i)) == int(i % 4));
  CHECK(theme_for_index(ThemeKind::Sketch, 5) == ThemeKind::Sketch);
  CHECK_THROWS_AS(theme(ThemeKind::Mixed), ConfigError);
  CHECK(is_sketch(ThemeKind::Sketch));
  CHECK_FALSE(is_sketch(ThemeKind::Win98));
}

TEST_CASE("win95 button render") {
  const Theme& th = theme(ThemeKind::Win95);
  const Patch p = render_widget(3, th, 80, 24, 1);
  REQUIRE(p.width() == 80);
  REQUIRE(p.height() == 24);
  CHECK(p.owned_count() == 80u * 24u);
  // Raised bevel: light outer top-left, dark outer bottom-right, then the inner pair.
  CHECK(p.image.at(0, 10) == th.highlight);
  CHECK(p.image.at(10, 0) == th.highlight);
  CHECK(p.image.at(23, 10) == th.dark);
  CHECK(p.image.at(10, 79) == th.dark);
  CHECK(p.image.at(1, 10) == th.light);
  CHECK(p.image.at(22, 10) == th.shadow);
  CHECK(p.image.at(10, 78) == th.shadow);
  CHECK(p.image.at(2, 3) == th.face);
  CHECK(patch_hash(p) == kGoldenButton);
}

TEST_CASE("renders are deterministic and sizes are checked") {
  for (auto kind : {ThemeKind::Win95, ThemeKind::Win98, ThemeKind::WinXp, ThemeKind::Sketch}) {
    const Theme& th = theme(kind);
    for (const auto& wc : taxonomy()) {
      if (wc.fine_id == 0) continue;
      const SizeRange r = size_range(wc.fine_id);
      const int w = (r.min_w + r.max_w) / 2, h = (r.min_h + r.max_h) / 2;
      const Patch a = render_widget(wc.fine_id, th, w, h, 99);
      const Patch b = render_widget(wc.fine_id, th, w, h, 99);
      CHECK(a.image == b.image);
      CHECK(a.own == b.own);
      CHECK(a.paint == b.paint);
      CHECK(a.owned_count() > 0);
      CHECK(a.owned_count() <= static_cast<std::size_t>(w) * h);
      // Owned pixels are always painted.
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          if (a.owned(x, y)) REQUIRE(a.painted(x, y));
      CHECK_THROWS_AS(render_widget(wc.fine_id, th, r.max_w + 1, h, 1), ConfigError);
      CHECK_THROWS_AS(render_widget(wc.fine_id, th, w, r.min_h - 1, 1), ConfigError);
    }
    CHECK_THROWS_AS(render_widget(0, th, 20, 20, 1), ConfigError);
  }
}

TEST_CASE("checkbox mask is a proper subset of its box") {
  for (auto kind : {ThemeKind::Win95, ThemeKind::WinXp, ThemeKind::Sketch}) {
    const Patch p = render_widget(10, theme(kind), 90, 18, 5);
    CHECK(p.owned_count() > 0);
    CHECK(p.owned_count() <= 90u * 18u);
  }
  const Patch radio = render_widget(12, theme(ThemeKind::Win98), 24, 24, 5);
  CHECK(radio.owned_count() < 24u * 24u);
}

TEST_CASE("window client area paints but is not owned") {
  const Patch p = render_widget(1, theme(ThemeKind::Win95), 200, 150, 3);
  CHECK(p.painted(100, 100));
  CHECK_FALSE(p.owned(100, 100));
  CHECK(p.owned(100, 1));
}

TEST_CASE("sketch strokes wobble by at most two pixels") {
  Rng rng(4);
  Patch p(80, 21);
  p.claim_rect(Rect{0, 0, 80, 21}, true);
  p.fill_rect(Rect{0, 0, 80, 21}, Rgb{255, 255, 255});
  p.sketch_line(5, 10, 75, 10, Rgb{0, 0, 0}, 2.0, rng);
  int drawn = 0;
  for (int y = 0; y < 21; ++y)
    for (int x = 0; x < 80; ++x)
      if (p.image.at(y, x) == Rgb{0, 0, 0}) {
        ++drawn;
        CHECK(std::abs(y - 10) <= 2);
      }
  CHECK(drawn >= 70);
}

TEST_CASE("sketch scenes are monochrome") {
  ScenePolicy policy;
  const Observation obs = compose_random_scene(policy, ThemeKind::Sketch, 128, Granularity::Coarse, 8);
  int spread = 0;
  for (std::size_t i = 0; i < obs.image.px.size(); i += 3) {
    const int r = obs.image.px[i], g = obs.image.px[i + 1], b = obs.image.px[i + 2];
    spread = std::max({spread, std::abs(r - g), std::abs(g - b), std::abs(r - b)});
  }
  CHECK(spread <= 10);
}

TEST_CASE("empty scene is background") {
  const Observation obs = compose_scene({}, ThemeKind::Win98, 40, 50, Granularity::Coarse);
  CHECK(obs.height() == 40);
  CHECK(obs.width() == 50);
  CHECK(std::all_of(obs.labels.begin(), obs.labels.end(), [](auto v) { return v == 0; }));
  CHECK(std::all_of(obs.instance_map.begin(), obs.instance_map.end(), [](auto v) { return v == 0; }));
  CHECK(obs.scene_label == 0);
  CHECK(obs.image.at(5, 5) == theme(ThemeKind::Win98).desktop);
}

TEST_CASE("later widgets occlude earlier ones") {
  // A: button at (10,10) 60x20; B: icon at (40,15) 24x24 drawn over it.
  const std::vector<WidgetPlacement> ws{{3, Rect{10, 10, 60, 20}, 1}, {22, Rect{40, 15, 24, 24}, 2}};
  const Observation obs = compose_scene(ws, ThemeKind::Win95, 64, 96, Granularity::Fine);
  const Patch icon = render_widget(22, theme(ThemeKind::Win95), 24, 24, 2);
  int overlap_owned = 0;
  for (int y = 15; y < 30; ++y)
    for (int x = 40; x < 64; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * 96 + x;
      if (icon.owned(x - 40, y - 15)) {
        ++overlap_owned;
        CHECK(obs.labels[i] == 22);
        CHECK(obs.instance_map[i] == 2);
      }
    }
  CHECK(overlap_owned > 0);
  CHECK(obs.labels[static_cast<std::size_t>(12) * 96 + 12] == 3);
  CHECK(obs.instance_map[static_cast<std::size_t>(12) * 96 + 12] == 1);
  check_scan_agreement(obs);
}

TEST_CASE("fully hidden widgets get no id") {
  const std::vector<WidgetPlacement> ws{
      {3, Rect{10, 10, 30, 20}, 1}, {3, Rect{5, 5, 60, 30}, 2}, {22, Rect{100, 100, 20, 20}, 3}};
  const Observation obs = compose_scene(ws, ThemeKind::Win95, 64, 96, Granularity::Coarse);
  CHECK(obs.widgets.size() == 3);
  CHECK(obs.widgets[0].id == 0);
  CHECK(obs.widgets[1].id == 1);
  CHECK(obs.widgets[2].id == 0);
  CHECK(obs.widgets[2].bbox.empty());
  check_scan_agreement(obs);
}

TEST_CASE("random scenes agree with the pixel-scan oracle") {
  ScenePolicy policy;
  for (std::uint64_t seed = 0; seed < 24; ++seed) {
    CAPTURE(seed);
    const auto kind = theme_for_index(ThemeKind::Mixed, seed);
    const Observation obs = compose_random_scene(policy, kind, seed % 2 ? 352 : 96, Granularity::Fine, seed);
    CHECK(obs.widgets.size() >= 3);
    check_scan_agreement(obs);
  }
}

TEST_CASE("the pixel-scan oracle detects corrupted maps") {
  const Observation obs = compose_random_scene(ScenePolicy{}, ThemeKind::Win98, 96, Granularity::Coarse, 3);
  REQUIRE(test::scan_disagreement(obs) == "");
  const auto owned = static_cast<std::size_t>(
      std::find_if(obs.instance_map.begin(), obs.instance_map.end(), [](auto v) { return v != 0; }) - obs.instance_map.begin());
  REQUIRE(owned < obs.instance_map.size());
  Observation bad = obs;
  bad.labels[owned] = static_cast<std::uint16_t>(bad.labels[owned] == 1 ? 2 : 1);
  CHECK(test::scan_disagreement(bad) != "");
  bad = obs;
  bad.instance_map[owned] = 0;
  CHECK(test::scan_disagreement(bad) != "");
  bad = obs;
  bad.scene_label = static_cast<std::uint16_t>((bad.scene_label + 1) % 11);
  CHECK(test::scan_disagreement(bad) != "");
}

TEST_CASE("projection commutes with generation") {
  GeneratorConfig fine;
  fine.count = 6;
  fine.size = 96;
  fine.granularity = Granularity::Fine;
  fine.seed = 17;
  GeneratorConfig coarse_cfg = fine;
  coarse_cfg.granularity = Granularity::Coarse;
  for (std::uint64_t i = 0; i < 6; ++i) {
    const Observation f = generate_observation(fine, i), c = generate_observation(coarse_cfg, i);
    CHECK(f.image == c.image);
    CHECK(f.instance_map == c.instance_map);
    std::vector<std::uint16_t> projected(f.labels.size());
    std::transform(f.labels.begin(), f.labels.end(), projected.begin(),
                   [](std::uint16_t v) { return static_cast<std::uint16_t>(project(v, Granularity::Coarse)); });
    CHECK(projected == c.labels);
  }
}

TEST_CASE("meta-batch determinism and configuration") {
  GeneratorConfig defaults;
  CHECK(defaults.count == 3072);
  CHECK(defaults.size == 352);
  CHECK(defaults.theme == ThemeKind::Mixed);
  GeneratorConfig cfg;
  cfg.count = 12;
  cfg.size = 64;
  cfg.seed = 42;
  const MetaBatch a = generate_meta_batch(cfg), b = generate_meta_batch(cfg);
  REQUIRE(a.observations.size() == 12);
  CHECK(a.observations == b.observations);
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(a.observations[i].theme == theme_for_index(ThemeKind::Mixed, i));
    CHECK(a.observations[i] == generate_observation(cfg, i));
  }
  cfg.seed = 43;
  CHECK_FALSE(generate_meta_batch(cfg).observations == a.observations);
}

TEST_CASE("coarse limit restricts classes") {
  GeneratorConfig cfg;
  cfg.count = 16;
  cfg.size = 64;
  cfg.coarse_limit = 5;
  cfg.seed = 3;
  CHECK(cfg.num_classes() == 5);
  std::set<int> seen;
  for_each_observation(cfg, [&](std::uint64_t, Observation&& obs) {
    for (auto v : obs.labels) seen.insert(v);
    for (const auto& w : obs.widgets) CHECK(coarse_of(w.fine_id) < 5);
  });
  CHECK(*seen.rbegin() < 5);
  CHECK(seen.size() >= 3);
}

TEST_CASE("every coarse class appears in at least 1% of observations") {
  GeneratorConfig cfg;
  cfg.count = 512;
  cfg.seed = 5;
  std::vector<int> present(11, 0);
  for_each_observation(cfg, [&](std::uint64_t, Observation&& obs) {
    std::vector<bool> has(11, false);
    for (auto v : obs.labels) has[v] = true;
    for (int c = 0; c < 11; ++c) present[static_cast<std::size_t>(c)] += has[static_cast<std::size_t>(c)] ? 1 : 0;
  });
  for (int c = 0; c < 11; ++c) {
    CAPTURE(c);
    CHECK(present[static_cast<std::size_t>(c)] >= 0.01 * cfg.count);
  }
}

}  // TEST_SUITE
