#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "cloudifier/model/network.hpp"
#include "cloudifier/scene/canvas.hpp"

namespace cloudifier::cli {

// Process exit codes.
enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

// Maps the exception in flight to an exit code and prints it to `err`.
int report_exception(std::ostream& err);

struct GenDataOptions {
  std::string out;
  int meta_batches = 1;  // > 1 writes <stem>-000<ext>, <stem>-001<ext>, ...
  int obs = 3072;
  int size = 352;
  std::string theme = "mixed";
  std::string granularity = "coarse";
  std::uint64_t seed = 0;  // meta-batch b uses seed + b
  int num_classes = 0;     // coarse groups kept; 0 = all
  std::string preview_dir;  // optional PNG previews plus raw label maps
  int preview_count = 4;
};

struct TrainOptions {
  std::vector<std::string> data;
  std::string variant = "micro";
  int batch = 32;
  bool any_batch = false;  // lift the [32, 128] batch-size range check
  double lr = 0.01;
  std::string loss = "nll";
  double focal_gamma = 2.0;
  double background_weight = 1.0;  // focal class weight of background
  int epochs = 10;
  std::uint64_t seed = 0;
  std::string augment_policy;      // empty = no augmentation
  std::string augment_routing = "sketch";
  std::string monitor = "dev";     // loss driving the plateau schedule
  int patience = 3;
  std::string ckpt;
  std::string history;
};

struct EvalOptions {
  std::string ckpt;
  std::vector<std::string> data;
  std::string subset = "all";  // all | train | dev | test, split as in training
  std::uint64_t seed = 0;      // split seed for subsets
  std::string json_out;
};

struct InferOptions {
  std::string ckpt;
  std::string image;
  std::string labels_out;   // raw little-endian u16, row-major
  std::string overlay_out;  // .ppm or PNG
  std::string logits_out;   // raw little-endian float32, (h, w, classes)
  std::string pad = "reflect";  // reflect | none
};

int cmd_gen_data(const GenDataOptions& o, std::ostream& log);
int cmd_train(const TrainOptions& o, std::ostream& log);
int cmd_eval(const EvalOptions& o, std::ostream& log);
int cmd_infer(const InferOptions& o, std::ostream& log);

// Output path of meta-batch `index` out of `count`.
std::string meta_batch_path(const std::string& out, int index, int count);

// Fixed colour per class id; class 0 is black.
scene::Rgb class_color(int class_id);
// Per-channel (image + colour + 1) / 2: the class colour at 50% alpha.
scene::Image overlay(const scene::Image& image, const std::vector<std::uint16_t>& labels);
scene::Image colorize(const std::vector<std::uint16_t>& labels, int height, int width);

// Mirror-pads bottom and right so both sides become multiples of `multiple`;
// the edge row and column are not repeated.
scene::Image reflect_pad(const scene::Image& image, int multiple);

struct Inference {
  std::vector<std::uint16_t> labels;  // h*w argmax
  std::vector<float> logits;          // h*w*classes
  int classes = 0;
};
// Runs the network on an 8-bit RGB image of any size, padding as requested
// and cropping the prediction back to the input size.
Inference infer_image(model::Network& net, const scene::Image& image, const std::string& pad);

}  // namespace cloudifier::cli
