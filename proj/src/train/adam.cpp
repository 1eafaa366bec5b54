#include <cmath>

#include "cloudifier/common.hpp"
#include "cloudifier/train/optim.hpp"

namespace cloudifier::train {

Adam::Adam(std::vector<ag::Variable> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
  set_learning_rate(config.lr);
  if (!(config.beta1 >= 0 && config.beta1 < 1 && config.beta2 >= 0 && config.beta2 < 1)) {
    throw ConfigError("adam: betas must be in [0, 1)");
  }
  if (!(config.eps > 0)) throw ConfigError("adam: eps must be positive");
  for (const auto& p : params_) {
    m_.emplace_back(p.shape());
    v_.emplace_back(p.shape());
  }
}

void Adam::set_learning_rate(double lr) {
  if (!(lr >= 0) || !std::isfinite(lr)) throw ConfigError("adam: learning rate must be finite and >= 0");
  config_.lr = lr;
}

void Adam::step(std::span<const Tensor> grads) {
  if (grads.size() != params_.size()) {
    throw ShapeError("adam: " + std::to_string(grads.size()) + " gradients for " +
                     std::to_string(params_.size()) + " parameters");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    require_same_shape(grads[i].shape(), params_[i].shape(), "adam_step");
    if (!grads[i].all_finite()) {
      throw NumericError("adam: non-finite gradient for '" + params_[i].name() + "', step rejected");
    }
  }
  ++t_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < grads.size(); ++i) {
    real_t* p = params_[i].mutable_value().ptr();
    real_t* m = m_[i].ptr();
    real_t* v = v_[i].ptr();
    const real_t* g = grads[i].ptr();
    for (std::size_t k = 0; k < grads[i].size(); ++k) {
      const double mk = b1 * m[k] + (1.0 - b1) * g[k];
      const double vk = b2 * v[k] + (1.0 - b2) * static_cast<double>(g[k]) * g[k];
      m[k] = static_cast<real_t>(mk);
      v[k] = static_cast<real_t>(vk);
      p[k] = static_cast<real_t>(p[k] - config_.lr * (mk / c1) / (std::sqrt(vk / c2) + config_.eps));
    }
  }
}

void Adam::step() {
  std::vector<Tensor> grads;
  grads.reserve(params_.size());
  for (const auto& p : params_) grads.push_back(p.has_grad() ? p.grad() : Tensor(p.shape()));
  step(grads);
}

}  // namespace cloudifier::train
