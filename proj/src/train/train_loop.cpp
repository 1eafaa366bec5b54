#include "cloudifier/train/train_loop.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "cloudifier/common.hpp"
#include "cloudifier/rng.hpp"

namespace cloudifier::train {

using scene::Observation;

LossKind parse_loss_kind(const std::string& s) {
  if (s == "nll") return LossKind::Nll;
  if (s == "focal") return LossKind::Focal;
  throw ConfigError("unknown loss '" + s + "' (expected nll or focal)");
}

const char* loss_kind_name(LossKind k) { return k == LossKind::Nll ? "nll" : "focal"; }

std::string History::to_csv() const {
  std::ostringstream out;
  out.precision(9);
  out << "epoch,train_loss,dev_loss,lr\n";
  for (const auto& e : epochs) {
    out << e.epoch << ',' << e.train_loss << ',';
    if (std::isnan(e.dev_loss)) out << "nan"; else out << e.dev_loss;
    out << ',' << e.lr << '\n';
  }
  return out.str();
}

void History::write_csv(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << to_csv();
    if (!out) throw ConfigError("cannot write history file '" + path + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw ConfigError("cannot move history file into place at '" + path + "'");
  }
}

Tensor images_to_tensor(std::span<const Observation* const> batch) {
  if (batch.empty()) throw ShapeError("images_to_tensor: empty batch");
  const int h = batch.front()->height(), w = batch.front()->width();
  Tensor x(Shape{static_cast<int>(batch.size()), h, w, 3});
  real_t* dst = x.ptr();
  for (const Observation* obs : batch) {
    if (obs->height() != h || obs->width() != w) {
      throw ShapeError("images_to_tensor: mixed observation sizes " + std::to_string(w) + "x" +
                       std::to_string(h) + " and " + std::to_string(obs->width()) + "x" +
                       std::to_string(obs->height()));
    }
    for (std::uint8_t v : obs->image.px) *dst++ = static_cast<real_t>(v) / real_t{255};
  }
  return x;
}

ops::LabelMap labels_of(std::span<const Observation* const> batch) {
  ops::LabelMap m;
  m.n = static_cast<int>(batch.size());
  m.h = batch.empty() ? 0 : batch.front()->height();
  m.w = batch.empty() ? 0 : batch.front()->width();
  for (const Observation* obs : batch) m.labels.insert(m.labels.end(), obs->labels.begin(), obs->labels.end());
  return m;
}

namespace {

double gamma_of(LossKind loss, double focal_gamma) { return loss == LossKind::Focal ? focal_gamma : 0.0; }

std::span<const double> weights_of(LossKind loss, const std::vector<double>& w) {
  return loss == LossKind::Focal ? std::span<const double>(w) : std::span<const double>();
}

}  // namespace

double dataset_loss(model::Network& net, const std::vector<Observation>& data, LossKind loss,
                    double focal_gamma, std::span<const double> class_weights, int batch_size) {
  if (data.empty()) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  std::size_t pixels = 0;
  for (std::size_t start = 0; start < data.size(); start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(data.size(), start + static_cast<std::size_t>(batch_size));
    std::vector<const Observation*> batch;
    for (std::size_t i = start; i < end; ++i) batch.push_back(&data[i]);
    const Tensor probs = ops::softmax_per_fiber(net.infer(images_to_tensor(batch)));
    const ops::LabelMap labels = labels_of(batch);
    const double g = gamma_of(loss, focal_gamma);
    const double l = g == 0.0 && class_weights.empty() ? ops::dense_nll_loss(probs, labels)
                                                       : ops::focal_dense_loss(probs, labels, g, class_weights);
    total += l * static_cast<double>(labels.labels.size());
    pixels += labels.labels.size();
  }
  return total / static_cast<double>(pixels);
}

History train_loop(model::Network& net, const std::vector<Observation>& train_set,
                   const std::vector<Observation>& dev, const TrainConfig& config,
                   const std::function<void(const EpochRecord&)>& on_epoch) {
  if (train_set.empty()) throw ConfigError("train_loop: empty training set");
  if (config.epochs < 0) throw ConfigError("train_loop: epochs must be >= 0");
  if (config.batch_size < 1 ||
      (!config.allow_any_batch_size && (config.batch_size < 32 || config.batch_size > 128))) {
    throw ConfigError("train_loop: batch size " + std::to_string(config.batch_size) +
                      " outside [32, 128]");
  }
  if (config.in_training_validation < 0 || config.in_training_validation >= 1) {
    throw ConfigError("train_loop: in-training validation fraction must be in [0, 1)");
  }
  const std::span<const double> weights = weights_of(config.loss, config.class_weights);
  const double gamma = gamma_of(config.loss, config.focal_gamma);

  Rng rng(config.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Observation> validation;
  if (config.in_training_validation > 0) {
    for (std::size_t i = order.size() - 1; i > 0; --i)
      std::swap(order[i], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i)))]);
    const auto held = static_cast<std::size_t>(std::floor(config.in_training_validation * order.size()));
    for (std::size_t i = 0; i < held && order.size() > 1; ++i) {
      validation.push_back(train_set[order.back()]);
      order.pop_back();
    }
  }

  AdamConfig adam_config = config.adam;
  adam_config.lr = config.lr;
  Adam adam(net.trainable(), adam_config);
  PlateauSchedule schedule(config.lr, config.plateau);
  History history;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = order.size() - 1; i > 0; --i)
      std::swap(order[i], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i)))]);
    double total = 0.0;
    std::size_t pixels = 0;
    int batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      ++batch_no;
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::vector<const Observation*> batch;
      for (std::size_t i = start; i < end; ++i) batch.push_back(&train_set[order[i]]);
      const ops::LabelMap labels = labels_of(batch);

      const std::string where = "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_no);
      double value = 0.0;
      try {
        ag::Tape tape;
        const ag::Variable x(images_to_tensor(batch));
        const ag::Variable logits = net.forward(tape, x, ops::BnMode::Train);
        const ag::Variable probs = ag::softmax_per_fiber(tape, logits);
        const ag::Variable loss = ag::dense_loss(tape, probs, labels, gamma, weights);
        value = loss.value()[0];
        if (!std::isfinite(value)) throw NumericError("non-finite training loss");
        for (const auto& p : net.trainable()) p.zero_grad();
        tape.backward(loss);
        adam.step();
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " (" + where + ")");
      }
      total += value * static_cast<double>(labels.labels.size());
      pixels += labels.labels.size();
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = total / static_cast<double>(pixels);
    rec.lr = adam.learning_rate();
    rec.dev_loss = dataset_loss(net, dev, config.loss, config.focal_gamma, weights, config.batch_size);
    rec.validation_loss =
        dataset_loss(net, validation, config.loss, config.focal_gamma, weights, config.batch_size);
    const double monitored =
        config.monitor == TrainConfig::Monitor::Train || std::isnan(rec.dev_loss) ? rec.train_loss : rec.dev_loss;
    if (!std::isfinite(monitored)) {
      throw NumericError("non-finite dev loss after epoch " + std::to_string(epoch));
    }
    adam.set_learning_rate(schedule.observe(monitored));
    history.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return history;
}

}  // namespace cloudifier::train
