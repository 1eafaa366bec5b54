#pragma once

#include <span>
#include <vector>

#include "cloudifier/autograd/tape.hpp"

namespace cloudifier::train {

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over a fixed parameter list.
class Adam {
 public:
  Adam(std::vector<ag::Variable> params, AdamConfig config = {});

  // Updates every parameter from `grads` (same order and shapes). Throws
  // NumericError, leaving all state untouched, if any gradient is non-finite.
  void step(std::span<const Tensor> grads);
  // Uses the parameters' own gradient slots; a missing gradient counts as 0.
  void step();

  double learning_rate() const { return config_.lr; }
  void set_learning_rate(double lr);
  long steps() const { return t_; }
  const Tensor& first_moment(std::size_t i) const { return m_.at(i); }
  const Tensor& second_moment(std::size_t i) const { return v_.at(i); }

 private:
  std::vector<ag::Variable> params_;
  AdamConfig config_;
  std::vector<Tensor> m_, v_;
  long t_ = 0;
};

struct PlateauConfig {
  double factor = 0.5;
  int patience = 3;
  double min_delta = 1e-3;
  double min_lr = 1e-5;
};

// Reduce-on-plateau. An epoch improves when best - loss >= min_delta; after
// `patience` consecutive epochs without improvement the rate is multiplied by
// `factor` (never below min_lr) and the count restarts.
class PlateauSchedule {
 public:
  explicit PlateauSchedule(double initial_lr, PlateauConfig config = {});

  // Feeds one epoch's monitored loss; returns the rate for the next epoch.
  double observe(double loss);
  double lr() const { return lr_; }
  double best() const { return best_; }
  int stale_epochs() const { return stale_; }

 private:
  PlateauConfig config_;
  double lr_;
  double best_ = 0.0;
  bool has_best_ = false;
  int stale_ = 0;
};

}  // namespace cloudifier::train
