#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cloudifier/model/network.hpp"
#include "cloudifier/ops/ops.hpp"
#include "cloudifier/scene/scene.hpp"
#include "cloudifier/train/optim.hpp"

namespace cloudifier::train {

enum class LossKind { Nll, Focal };
LossKind parse_loss_kind(const std::string& s);
const char* loss_kind_name(LossKind k);

struct TrainConfig {
  int epochs = 10;
  int batch_size = 32;
  bool allow_any_batch_size = false;  // otherwise batch_size must be in [32, 128]
  double lr = 0.01;
  LossKind loss = LossKind::Nll;
  double focal_gamma = 2.0;
  std::vector<double> class_weights;  // empty = all 1
  std::uint64_t seed = 0;
  AdamConfig adam;                    // lr is taken from `lr`
  PlateauConfig plateau;
  // Loss fed to the plateau schedule. Dev is the default; memorisation runs
  // monitor the training loss. Without a dev set the training loss is used.
  enum class Monitor { Dev, Train } monitor = Monitor::Dev;
  // Fraction of the training partition held out once as an in-training
  // validation set; 0 disables it.
  double in_training_validation = 0.0;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_loss = 0.0;  // NaN when there is no dev set
  double lr = 0.0;        // rate used during this epoch
  double validation_loss = 0.0;  // NaN unless in_training_validation > 0
};

struct History {
  std::vector<EpochRecord> epochs;
  // "epoch,train_loss,dev_loss,lr" then one row per epoch.
  std::string to_csv() const;
  void write_csv(const std::string& path) const;
};

// Network input for a batch: pixel values scaled by 1/255.
Tensor images_to_tensor(std::span<const scene::Observation* const> batch);
ops::LabelMap labels_of(std::span<const scene::Observation* const> batch);

// Mean per-pixel loss of the network in inference mode.
double dataset_loss(model::Network& net, const std::vector<scene::Observation>& data, LossKind loss,
                    double focal_gamma, std::span<const double> class_weights, int batch_size);

// Each epoch: shuffle, then forward, loss, backward and an Adam step per
// batch; the dev loss drives the plateau schedule. Throws NumericError naming
// the epoch and batch if the loss stops being finite.
History train_loop(model::Network& net, const std::vector<scene::Observation>& train,
                   const std::vector<scene::Observation>& dev, const TrainConfig& config,
                   const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace cloudifier::train
