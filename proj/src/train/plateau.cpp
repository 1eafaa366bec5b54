#include <algorithm>
#include <cmath>

#include "cloudifier/common.hpp"
#include "cloudifier/train/optim.hpp"

namespace cloudifier::train {

PlateauSchedule::PlateauSchedule(double initial_lr, PlateauConfig config)
    : config_(config), lr_(initial_lr) {
  if (!(initial_lr >= 0)) throw ConfigError("plateau: initial learning rate must be >= 0");
  if (!(config.factor > 0 && config.factor < 1)) throw ConfigError("plateau: factor must be in (0, 1)");
  if (config.patience < 1) throw ConfigError("plateau: patience must be at least 1");
  if (config.min_delta < 0 || config.min_lr < 0) throw ConfigError("plateau: min_delta and min_lr must be >= 0");
}

double PlateauSchedule::observe(double loss) {
  if (!std::isfinite(loss)) throw NumericError("plateau: non-finite monitored loss");
  if (!has_best_) {
    best_ = loss;
    has_best_ = true;
    return lr_;
  }
  if (best_ - loss >= config_.min_delta) {
    best_ = loss;
    stale_ = 0;
    return lr_;
  }
  if (++stale_ >= config_.patience) {
    // A rate already under the floor (e.g. 0) is left alone.
    if (lr_ > config_.min_lr) lr_ = std::max(lr_ * config_.factor, config_.min_lr);
    stale_ = 0;
  }
  return lr_;
}

}  // namespace cloudifier::train
