#include "cloudifier/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>

#include "cloudifier/augment/augment.hpp"
#include "cloudifier/io/checkpoint_io.hpp"
#include "cloudifier/io/dataset_io.hpp"
#include "cloudifier/io/image_io.hpp"
#include "cloudifier/rng.hpp"
#include "cloudifier/train/evaluate.hpp"
#include "cloudifier/train/split.hpp"
#include "cloudifier/train/train_loop.hpp"

namespace cloudifier::cli {

using scene::Image;
using scene::Observation;

int report_exception(std::ostream& err) {
  try {
    throw;
  } catch (const io::IoError& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
}

std::string meta_batch_path(const std::string& out, int index, int count) {
  if (count == 1) return out;
  const std::filesystem::path p(out);
  char suffix[16];
  std::snprintf(suffix, sizeof suffix, "-%03d", index);
  return (p.parent_path() / (p.stem().string() + suffix + p.extension().string())).string();
}

scene::Rgb class_color(int class_id) {
  if (class_id == 0) return {0, 0, 0};
  const std::uint64_t h = mix64(static_cast<std::uint64_t>(class_id) * 0x9E3779B97F4A7C15ULL);
  // Keep every channel away from black so classes stay visible.
  return {static_cast<std::uint8_t>(64 + (h & 0xBF)), static_cast<std::uint8_t>(64 + ((h >> 8) & 0xBF)),
          static_cast<std::uint8_t>(64 + ((h >> 16) & 0xBF))};
}

Image overlay(const Image& image, const std::vector<std::uint16_t>& labels) {
  if (labels.size() != static_cast<std::size_t>(image.height) * image.width) {
    throw ShapeError("overlay: label map does not match the image size");
  }
  Image out = image;
  for (std::size_t p = 0; p < labels.size(); ++p) {
    const scene::Rgb c = class_color(labels[p]);
    const std::uint8_t rgb[3] = {c.r, c.g, c.b};
    for (int k = 0; k < 3; ++k) {
      std::uint8_t& v = out.px[p * 3 + static_cast<std::size_t>(k)];
      v = static_cast<std::uint8_t>((v + rgb[k] + 1) / 2);
    }
  }
  return out;
}

Image colorize(const std::vector<std::uint16_t>& labels, int height, int width) {
  Image out(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out.set(y, x, class_color(labels[static_cast<std::size_t>(y) * width + x]));
  }
  return out;
}

namespace {

int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  return i < n ? i : period - i;
}

int round_up(int v, int m) { return (v + m - 1) / m * m; }

}  // namespace

Image reflect_pad(const Image& image, int multiple) {
  if (multiple < 1) throw ConfigError("reflect_pad: multiple must be positive");
  const int h = round_up(image.height, multiple), w = round_up(image.width, multiple);
  if (h == image.height && w == image.width) return image;
  Image out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out.set(y, x, image.at(reflect_index(y, image.height), reflect_index(x, image.width)));
    }
  }
  return out;
}

Inference infer_image(model::Network& net, const Image& image, const std::string& pad) {
  if (image.height <= 0 || image.width <= 0) throw ShapeError("infer: empty image");
  const int m = net.max_downsample();
  Observation padded;
  if (pad == "reflect") {
    padded.image = reflect_pad(image, m);
  } else if (pad == "none") {
    if (image.height % m != 0 || image.width % m != 0) {
      throw ShapeError("infer: image is " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                       ", sides must be multiples of " + std::to_string(m) + " without padding");
    }
    padded.image = image;
  } else {
    throw ConfigError("infer: unknown pad mode '" + pad + "' (expected reflect or none)");
  }
  const Observation* one = &padded;
  const Tensor logits = net.infer(train::images_to_tensor(std::span(&one, 1)));
  Inference r;
  r.classes = logits.shape().c;
  const auto c = static_cast<std::size_t>(r.classes);
  const int pw = padded.image.width;
  r.labels.resize(static_cast<std::size_t>(image.height) * image.width);
  r.logits.resize(r.labels.size() * c);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const std::size_t dst = static_cast<std::size_t>(y) * image.width + x;
      const real_t* src = logits.ptr() + (static_cast<std::size_t>(y) * pw + x) * c;
      float* f = r.logits.data() + dst * c;
      int best = 0;
      for (std::size_t k = 0; k < c; ++k) {
        f[k] = static_cast<float>(src[k]);
        if (f[k] > f[best]) best = static_cast<int>(k);
      }
      r.labels[dst] = static_cast<std::uint16_t>(best);
    }
  }
  return r;
}

namespace {

struct LoadedData {
  io::DatasetHeader header;
  std::vector<Observation> observations;
};

LoadedData load_data(const std::vector<std::string>& paths, std::ostream& log) {
  if (paths.empty()) throw ConfigError("no dataset files given");
  LoadedData all;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    io::Dataset ds = io::read_dataset(paths[i]);
    const auto& h = ds.header;
    if (i == 0) {
      all.header = h;
    } else {
      const auto& f = all.header;
      auto mismatch = [&](const char* field, long got, long want) {
        throw io::IoError(io::IoErrorKind::ShapeMismatch, paths[i],
                          std::string(field) + " is " + std::to_string(got) + ", " + paths[0] + " has " +
                              std::to_string(want));
      };
      if (h.height != f.height) mismatch("height", h.height, f.height);
      if (h.width != f.width) mismatch("width", h.width, f.width);
      if (h.num_classes != f.num_classes) mismatch("num_classes", h.num_classes, f.num_classes);
      if (h.granularity != f.granularity) {
        mismatch("granularity", static_cast<long>(h.granularity), static_cast<long>(f.granularity));
      }
    }
    log << "loaded " << paths[i] << ": " << h.count << " observations " << h.width << "x" << h.height << ", "
        << h.num_classes << " classes\n";
    for (auto& obs : ds.observations) all.observations.push_back(std::move(obs));
  }
  all.header.count = static_cast<std::uint32_t>(all.observations.size());
  return all;
}

std::vector<Observation> subset_of(std::vector<Observation> data, const std::string& subset,
                                   std::uint64_t seed) {
  if (subset == "all") return data;
  train::SplitSpec spec;
  spec.seed = seed;
  auto split = train::split_dataset(data, spec);
  if (subset == "train") return std::move(split.train);
  if (subset == "dev") return std::move(split.dev);
  if (subset == "test") return std::move(split.test);
  throw ConfigError("unknown subset '" + subset + "' (expected all, train, dev or test)");
}

void write_u16(const std::string& path, const std::vector<std::uint16_t>& v) {
  io::ByteWriter w;
  w.u16_array(v);
  io::write_file_atomic(path, w.bytes());
}

}  // namespace

int cmd_gen_data(const GenDataOptions& o, std::ostream& log) {
  if (o.out.empty()) throw ConfigError("gen-data: --out is required");
  if (o.meta_batches < 1) throw ConfigError("gen-data: --meta-batches must be at least 1");
  if (o.obs < 1) throw ConfigError("gen-data: --obs must be at least 1");
  if (o.size < 8 || o.size > 4096) throw ConfigError("gen-data: --size must be in [8, 4096]");
  scene::GeneratorConfig cfg;
  cfg.count = o.obs;
  cfg.size = o.size;
  cfg.theme = scene::parse_theme_kind(o.theme);
  cfg.granularity = scene::parse_granularity(o.granularity);
  cfg.coarse_limit = o.num_classes;
  cfg.num_classes();
  for (int b = 0; b < o.meta_batches; ++b) {
    cfg.seed = o.seed + static_cast<std::uint64_t>(b);
    const std::string path = meta_batch_path(o.out, b, o.meta_batches);
    io::generate_to_file(path, cfg);
    log << "wrote " << path << ": " << cfg.count << " observations " << cfg.size << "x" << cfg.size << ", theme "
        << o.theme << ", " << cfg.num_classes() << " " << o.granularity << " classes, seed " << cfg.seed << '\n';
  }
  if (!o.preview_dir.empty()) {
    std::filesystem::create_directories(o.preview_dir);
    cfg.seed = o.seed;
    const int n = std::min(o.preview_count, o.obs);
    for (int i = 0; i < n; ++i) {
      const Observation obs = scene::generate_observation(cfg, static_cast<std::uint64_t>(i));
      char stem[32];
      std::snprintf(stem, sizeof stem, "obs_%05d", i);
      const std::filesystem::path base = std::filesystem::path(o.preview_dir) / stem;
      io::write_image(base.string() + ".png", obs.image);
      io::write_image(base.string() + ".labels.png", colorize(obs.labels, obs.height(), obs.width()));
      write_u16(base.string() + ".labels.u16", obs.labels);
    }
    log << "wrote " << n << " previews to " << o.preview_dir << '\n';
  }
  return kOk;
}

int cmd_train(const TrainOptions& o, std::ostream& log) {
  if (o.ckpt.empty()) throw ConfigError("train: --ckpt is required");
  if (o.epochs < 1) throw ConfigError("train: --epochs must be at least 1");
  if (o.lr < 0 || !std::isfinite(o.lr)) throw ConfigError("train: --lr must be finite and non-negative");
  if (o.patience < 1) throw ConfigError("train: --patience must be at least 1");
  train::TrainConfig tc;
  tc.epochs = o.epochs;
  tc.batch_size = o.batch;
  tc.allow_any_batch_size = o.any_batch;
  tc.lr = o.lr;
  tc.loss = train::parse_loss_kind(o.loss);
  tc.focal_gamma = o.focal_gamma;
  tc.seed = o.seed;
  tc.plateau.patience = o.patience;
  if (o.monitor == "dev") {
    tc.monitor = train::TrainConfig::Monitor::Dev;
  } else if (o.monitor == "train") {
    tc.monitor = train::TrainConfig::Monitor::Train;
  } else {
    throw ConfigError("train: unknown --monitor '" + o.monitor + "' (expected dev or train)");
  }
  if (o.background_weight != 1.0 && tc.loss != train::LossKind::Focal) {
    throw ConfigError("train: --background-weight applies to the focal loss only");
  }
  const auto routing = augment::parse_routing(o.augment_routing);
  std::optional<augment::AugmentPolicy> policy;
  if (!o.augment_policy.empty()) policy = augment::AugmentPolicy::load(o.augment_policy);

  LoadedData data = load_data(o.data, log);
  const int classes = data.header.num_classes;
  if (o.background_weight != 1.0) {
    tc.class_weights.assign(static_cast<std::size_t>(classes), 1.0);
    tc.class_weights[0] = o.background_weight;
  }
  model::Network net(model::variant_by_name(o.variant, classes), o.seed);
  net.check_input(Shape{1, data.header.height, data.header.width, 3});

  train::SplitSpec spec;
  spec.seed = o.seed;
  auto split = train::split_dataset(data.observations, spec);
  data.observations.clear();
  log << "split: " << split.train.size() << " train, " << split.dev.size() << " dev, " << split.test.size()
      << " test\n";
  if (policy) {
    split.train = augment::augment_for_training(std::move(split.train), *policy, stream_seed(o.seed, 1), routing);
    log << "augmented training set (" << augment::routing_name(routing) << "): " << split.train.size()
        << " observations\n";
  }
  log << net.config().variant << ": " << net.layer_count() << " layers, " << net.param_count() << " parameters\n";

  const train::History history = train::train_loop(net, split.train, split.dev, tc, [&](const train::EpochRecord& e) {
    log << "epoch " << e.epoch << " train_loss " << e.train_loss << " dev_loss " << e.dev_loss << " lr " << e.lr
        << '\n';
  });
  io::save_checkpoint(o.ckpt, net);
  log << "wrote " << o.ckpt << '\n';
  if (!o.history.empty()) {
    history.write_csv(o.history);
    log << "wrote " << o.history << '\n';
  }
  if (!split.test.empty()) {
    const auto report = train::evaluate(net, split.test, data.header.granularity);
    log << "test split:\n" << report.to_table();
  }
  return kOk;
}

int cmd_eval(const EvalOptions& o, std::ostream& log) {
  if (o.ckpt.empty()) throw ConfigError("eval: --ckpt is required");
  auto net = io::load_network(o.ckpt);
  LoadedData data = load_data(o.data, log);
  if (data.header.num_classes != net->num_classes()) {
    throw io::IoError(io::IoErrorKind::ShapeMismatch, o.data.front(),
                      "num_classes is " + std::to_string(data.header.num_classes) + ", checkpoint " + o.ckpt +
                          " predicts " + std::to_string(net->num_classes()));
  }
  net->check_input(Shape{1, data.header.height, data.header.width, 3});
  const auto subset = subset_of(std::move(data.observations), o.subset, o.seed);
  const auto report = train::evaluate(*net, subset, data.header.granularity);
  log << report.to_table();
  if (o.json_out.empty()) {
    log << report.to_json();
  } else {
    io::write_file_atomic(o.json_out, report.to_json());
    log << "wrote " << o.json_out << '\n';
  }
  return kOk;
}

int cmd_infer(const InferOptions& o, std::ostream& log) {
  if (o.ckpt.empty() || o.image.empty()) throw ConfigError("infer: --ckpt and --image are required");
  auto net = io::load_network(o.ckpt);
  const Image image = io::read_image(o.image);
  const Inference r = infer_image(*net, image, o.pad);
  if (!o.labels_out.empty()) write_u16(o.labels_out, r.labels);
  if (!o.logits_out.empty()) {
    io::ByteWriter w;
    w.raw(r.logits.data(), r.logits.size() * sizeof(float));
    io::write_file_atomic(o.logits_out, w.bytes());
  }
  if (!o.overlay_out.empty()) io::write_image(o.overlay_out, overlay(image, r.labels));
  std::vector<std::size_t> counts(static_cast<std::size_t>(r.classes), 0);
  for (auto l : r.labels) ++counts[l];
  log << o.image << ": " << image.width << "x" << image.height << ", class pixel counts";
  for (std::size_t k = 0; k < counts.size(); ++k) log << ' ' << k << ':' << counts[k];
  log << '\n';
  return kOk;
}

}  // namespace cloudifier::cli
