#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cloudifier/rng.hpp"
#include "cloudifier/scene/scene.hpp"

namespace cloudifier::augment {

struct AugmentPolicy {
  double rotation_range = 12.0;   // degrees, symmetric
  double shift_range = 0.10;      // fraction of height/width, symmetric
  int channel_shift_range = 25;   // 8-bit delta, symmetric
  bool flip = true;               // horizontal flips allowed
  double flip_probability = 0.5;
  double rescale_min = 0.85;
  double rescale_max = 1.15;
  int crop = 352;
  int expansion_factor = 7;

  // Throws ConfigError on negative ranges, a non-positive rescale interval or
  // expansion_factor < 1.
  void validate() const;
  // key=value lines; parse(to_text()) round-trips. '#' starts a comment.
  std::string to_text() const;
  static AugmentPolicy parse(const std::string& text);
  static AugmentPolicy load(const std::string& path);
  void save(const std::string& path) const;

  friend bool operator==(const AugmentPolicy&, const AugmentPolicy&) = default;
};

struct TransformParams {
  double rotation_deg = 0.0;  // counter-clockwise as displayed
  double shift_x = 0.0;       // pixels
  double shift_y = 0.0;
  double scale = 1.0;
  bool flip = false;          // horizontal mirror, applied first
  std::array<int, 3> channel_delta{};
  int crop_x = 0;
  int crop_y = 0;
  int crop_h = 0;  // 0 = no crop
  int crop_w = 0;
};

struct AugmentedPair {
  scene::Observation obs;
  std::uint64_t source_index = 0;
  TransformParams params;
  bool original = false;  // the untransformed copy of its source
};

// Mirror, then scale and rotate about the image center, then shift. Each
// output pixel center is mapped back through the inverse; the image is
// sampled bilinearly, labels and instances by nearest neighbour. Pixels that
// map outside the source get background and the theme's desktop colour.
scene::Observation geometric_transform(const scene::Observation& obs, double rotation_deg,
                                       double shift_x, double shift_y, double scale, bool flip);

// Per-channel additive shift, saturated to [0, 255].
void channel_shift(scene::Image& image, const std::array<int, 3>& deltas);

// Window of size h x w at (x, y) from every map of `obs`.
scene::Observation crop(const scene::Observation& obs, int x, int y, int h, int w);
// Uniform offset in [0, H-h] x [0, W-w]. Throws ConfigError when the source
// is smaller than the target.
AugmentedPair random_crop(const scene::Observation& obs, int h, int w, Rng& rng);

TransformParams sample_params(const AugmentPolicy& policy, int height, int width, Rng& rng);
scene::Observation apply(const scene::Observation& obs, const TransformParams& params);

// factor outputs per input: the original, then factor-1 random variants.
// Output j of input i draws from stream (seed, i, j).
std::vector<AugmentedPair> expand_dataset(const std::vector<scene::Observation>& observations,
                                          const AugmentPolicy& policy, std::uint64_t seed);

// Which observations the training pipeline expands. The default expands
// sketch observations only and passes artificial ones through once.
enum class Routing { SketchOnly, All, None };
Routing parse_routing(const std::string& s);
const char* routing_name(Routing r);

std::vector<scene::Observation> augment_for_training(std::vector<scene::Observation> observations,
                                                     const AugmentPolicy& policy, std::uint64_t seed,
                                                     Routing routing);

}  // namespace cloudifier::augment
