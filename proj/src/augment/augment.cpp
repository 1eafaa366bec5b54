#include "cloudifier/augment/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cloudifier/common.hpp"

namespace cloudifier::augment {

using scene::Image;
using scene::Observation;

namespace {

// Recomputes each widget's bbox from the instance map; ids that vanished
// become 0.
void refresh_widgets(Observation& obs) {
  std::vector<int> x0, y0, x1, y1;
  std::uint16_t max_id = 0;
  for (const auto& w : obs.widgets) max_id = std::max(max_id, w.id);
  x0.assign(max_id + 1u, obs.width());
  y0.assign(max_id + 1u, obs.height());
  x1.assign(max_id + 1u, -1);
  y1.assign(max_id + 1u, -1);
  for (int y = 0; y < obs.height(); ++y)
    for (int x = 0; x < obs.width(); ++x) {
      const std::uint16_t id = obs.instance_map[static_cast<std::size_t>(y) * obs.width() + x];
      if (id == 0 || id > max_id) continue;
      x0[id] = std::min(x0[id], x);
      y0[id] = std::min(y0[id], y);
      x1[id] = std::max(x1[id], x);
      y1[id] = std::max(y1[id], y);
    }
  for (auto& w : obs.widgets) {
    if (w.id == 0) continue;
    if (x1[w.id] < 0) {
      w.id = 0;
      w.bbox = {};
    } else {
      w.bbox = {x0[w.id], y0[w.id], x1[w.id] - x0[w.id] + 1, y1[w.id] - y0[w.id] + 1};
    }
    w.placement = w.bbox;
  }
}

std::uint8_t saturate(long v) { return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L)); }

}  // namespace

scene::Observation geometric_transform(const Observation& obs, double rotation_deg, double shift_x,
                                       double shift_y, double scale, bool flip) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ConfigError("geometric_transform: scale must be positive, got " + std::to_string(scale));
  }
  const int h = obs.height(), w = obs.width();
  const scene::Rgb fill = scene::theme(obs.theme).desktop;
  Observation out;
  out.theme = obs.theme;
  out.scene_label = obs.scene_label;
  out.widgets = obs.widgets;
  out.image = Image(h, w);
  out.labels.assign(obs.labels.size(), 0);
  out.instance_map.assign(obs.instance_map.size(), 0);

  // Forward map in pixel-center coordinates (u = x + 0.5):
  //   p' = c + s * R(theta) * (F(p) - c) + t
  // with y pointing down, so a positive angle turns the picture
  // counter-clockwise on screen. Inverse applied per output pixel.
  const double theta = rotation_deg * std::numbers::pi / 180.0;
  const double cs = std::cos(theta), sn = std::sin(theta);
  const double cx = w / 2.0, cy = h / 2.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double dx = x + 0.5 - cx - shift_x;
      const double dy = y + 0.5 - cy - shift_y;
      // R(theta) = [[cos, sin], [-sin, cos]]; its inverse is the transpose.
      double u = (cs * dx - sn * dy) / scale + cx;
      const double v = (sn * dx + cs * dy) / scale + cy;
      if (flip) u = w - u;
      const std::size_t o = static_cast<std::size_t>(y) * w + x;

      const int nx = static_cast<int>(std::floor(u));
      const int ny = static_cast<int>(std::floor(v));
      if (nx >= 0 && ny >= 0 && nx < w && ny < h) {
        const std::size_t i = static_cast<std::size_t>(ny) * w + nx;
        out.labels[o] = obs.labels[i];
        out.instance_map[o] = obs.instance_map[i];
      }

      const double fx = u - 0.5, fy = v - 0.5;
      const int x0 = static_cast<int>(std::floor(fx));
      const int y0 = static_cast<int>(std::floor(fy));
      const double ax = fx - x0, ay = fy - y0;
      double acc[3] = {0, 0, 0};
      for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) {
          const double wgt = (i ? ax : 1.0 - ax) * (j ? ay : 1.0 - ay);
          if (wgt == 0.0) continue;
          const int sx = x0 + i, sy = y0 + j;
          const scene::Rgb c = (sx >= 0 && sy >= 0 && sx < w && sy < h) ? obs.image.at(sy, sx) : fill;
          acc[0] += wgt * c.r;
          acc[1] += wgt * c.g;
          acc[2] += wgt * c.b;
        }
      out.image.set(y, x, {saturate(std::lround(acc[0])), saturate(std::lround(acc[1])),
                           saturate(std::lround(acc[2]))});
    }
  refresh_widgets(out);
  return out;
}

void channel_shift(Image& image, const std::array<int, 3>& deltas) {
  for (std::size_t i = 0; i < image.px.size(); ++i) {
    image.px[i] = saturate(static_cast<long>(image.px[i]) + deltas[i % 3]);
  }
}

scene::Observation crop(const Observation& obs, int x, int y, int h, int w) {
  if (h <= 0 || w <= 0 || x < 0 || y < 0 || x + w > obs.width() || y + h > obs.height()) {
    throw ConfigError("crop: window " + std::to_string(w) + "x" + std::to_string(h) + " at (" +
                      std::to_string(x) + "," + std::to_string(y) + ") does not fit a " +
                      std::to_string(obs.width()) + "x" + std::to_string(obs.height()) + " source");
  }
  Observation out;
  out.theme = obs.theme;
  out.scene_label = obs.scene_label;
  out.widgets = obs.widgets;
  out.image = Image(h, w);
  out.labels.resize(static_cast<std::size_t>(h) * w);
  out.instance_map.resize(out.labels.size());
  for (int r = 0; r < h; ++r) {
    const std::size_t src = static_cast<std::size_t>(y + r) * obs.width() + x;
    const std::size_t dst = static_cast<std::size_t>(r) * w;
    std::copy_n(obs.labels.begin() + static_cast<std::ptrdiff_t>(src), w,
                out.labels.begin() + static_cast<std::ptrdiff_t>(dst));
    std::copy_n(obs.instance_map.begin() + static_cast<std::ptrdiff_t>(src), w,
                out.instance_map.begin() + static_cast<std::ptrdiff_t>(dst));
    std::copy_n(obs.image.px.begin() + static_cast<std::ptrdiff_t>(src * 3), w * 3,
                out.image.px.begin() + static_cast<std::ptrdiff_t>(dst * 3));
  }
  refresh_widgets(out);
  return out;
}

AugmentedPair random_crop(const Observation& obs, int h, int w, Rng& rng) {
  if (h > obs.height() || w > obs.width()) {
    throw ConfigError("random_crop: source " + std::to_string(obs.width()) + "x" +
                      std::to_string(obs.height()) + " is smaller than the " + std::to_string(w) +
                      "x" + std::to_string(h) + " target");
  }
  AugmentedPair out;
  out.params.crop_x = rng.uniform_int(0, obs.width() - w);
  out.params.crop_y = rng.uniform_int(0, obs.height() - h);
  out.params.crop_h = h;
  out.params.crop_w = w;
  out.obs = crop(obs, out.params.crop_x, out.params.crop_y, h, w);
  return out;
}

TransformParams sample_params(const AugmentPolicy& policy, int height, int width, Rng& rng) {
  policy.validate();
  TransformParams p;
  p.rotation_deg = rng.uniform(-policy.rotation_range, policy.rotation_range);
  p.shift_x = rng.uniform(-policy.shift_range, policy.shift_range) * width;
  p.shift_y = rng.uniform(-policy.shift_range, policy.shift_range) * height;
  p.scale = rng.uniform(policy.rescale_min, policy.rescale_max);
  p.flip = policy.flip && rng.bernoulli(policy.flip_probability);
  for (auto& d : p.channel_delta) d = rng.uniform_int(-policy.channel_shift_range, policy.channel_shift_range);
  p.crop_h = std::min(policy.crop, height);
  p.crop_w = std::min(policy.crop, width);
  p.crop_y = rng.uniform_int(0, height - p.crop_h);
  p.crop_x = rng.uniform_int(0, width - p.crop_w);
  return p;
}

scene::Observation apply(const Observation& obs, const TransformParams& p) {
  Observation out = geometric_transform(obs, p.rotation_deg, p.shift_x, p.shift_y, p.scale, p.flip);
  channel_shift(out.image, p.channel_delta);
  if (p.crop_h > 0 && p.crop_w > 0 && (p.crop_h != out.height() || p.crop_w != out.width())) {
    out = crop(out, p.crop_x, p.crop_y, p.crop_h, p.crop_w);
  }
  return out;
}

namespace {

// The untransformed copy, center-cropped when the policy crop is smaller.
AugmentedPair original_of(const Observation& obs, const AugmentPolicy& policy, std::uint64_t index) {
  AugmentedPair out;
  out.source_index = index;
  out.original = true;
  const int ch = std::min(policy.crop, obs.height());
  const int cw = std::min(policy.crop, obs.width());
  if (ch == obs.height() && cw == obs.width()) {
    out.obs = obs;
  } else {
    out.params.crop_y = (obs.height() - ch) / 2;
    out.params.crop_x = (obs.width() - cw) / 2;
    out.params.crop_h = ch;
    out.params.crop_w = cw;
    out.obs = crop(obs, out.params.crop_x, out.params.crop_y, ch, cw);
  }
  return out;
}

}  // namespace

std::vector<AugmentedPair> expand_dataset(const std::vector<Observation>& observations,
                                          const AugmentPolicy& policy, std::uint64_t seed) {
  policy.validate();
  std::vector<AugmentedPair> out;
  out.reserve(observations.size() * static_cast<std::size_t>(policy.expansion_factor));
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const Observation& src = observations[i];
    out.push_back(original_of(src, policy, i));
    const std::uint64_t base = stream_seed(seed, i);
    for (int j = 1; j < policy.expansion_factor; ++j) {
      Rng rng(stream_seed(base, static_cast<std::uint64_t>(j)));
      AugmentedPair pair;
      pair.source_index = i;
      pair.params = sample_params(policy, src.height(), src.width(), rng);
      pair.obs = apply(src, pair.params);
      out.push_back(std::move(pair));
    }
  }
  return out;
}

Routing parse_routing(const std::string& s) {
  if (s == "sketch") return Routing::SketchOnly;
  if (s == "all") return Routing::All;
  if (s == "none") return Routing::None;
  throw ConfigError("unknown augmentation routing '" + s + "' (expected sketch, all or none)");
}

const char* routing_name(Routing r) {
  switch (r) {
    case Routing::SketchOnly: return "sketch";
    case Routing::All: return "all";
    case Routing::None: return "none";
  }
  return "?";
}

std::vector<Observation> augment_for_training(std::vector<Observation> observations,
                                              const AugmentPolicy& policy, std::uint64_t seed,
                                              Routing routing) {
  policy.validate();
  std::vector<Observation> out;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    Observation& obs = observations[i];
    const bool expand = routing == Routing::All ||
                        (routing == Routing::SketchOnly && scene::is_sketch(obs.theme));
    if (!expand) {
      out.push_back(original_of(obs, policy, i).obs);
      continue;
    }
    std::vector<Observation> one{std::move(obs)};
    for (auto& pair : expand_dataset(one, policy, stream_seed(seed, i))) out.push_back(std::move(pair.obs));
  }
  return out;
}

}  // namespace cloudifier::augment
