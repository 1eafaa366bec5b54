#include <algorithm>
#include <cmath>
#include <string>

#include "cloudifier/ops/ops.hpp"

namespace cloudifier::ops {
namespace {

void check_inputs(const Tensor& probs, const LabelMap& labels, std::span<const double> weights) {
  const Shape& s = probs.shape();
  if (labels.n != s.n || labels.h != s.h || labels.w != s.w ||
      labels.labels.size() != s.pixels()) {
    throw ShapeError("dense loss: labels (" + std::to_string(labels.n) + "," +
                     std::to_string(labels.h) + "," + std::to_string(labels.w) +
                     ") do not match probabilities " + s.str());
  }
  if (!weights.empty() && weights.size() != static_cast<std::size_t>(s.c)) {
    throw ShapeError("dense loss: " + std::to_string(weights.size()) + " class weights for " +
                     std::to_string(s.c) + " classes");
  }
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    if (labels.labels[i] >= s.c) {
      throw ConfigError("dense loss: label " + std::to_string(labels.labels[i]) + " at pixel " +
                        std::to_string(i) + " out of range [0," + std::to_string(s.c) + ")");
    }
  }
}

double pixel_term(double p, double gamma) {
  const double logp = std::log(std::max(p, kProbFloor));
  if (gamma == 0.0) return -logp;
  return -focal_modulation(p, gamma) * logp;
}

double pixel_grad(double p, double gamma) {
  const bool clamped = p < kProbFloor;
  if (gamma == 0.0) return clamped ? 0.0 : -1.0 / p;
  const double q = 1.0 - p;
  const double logp = std::log(std::max(p, kProbFloor));
  const double mod_term = q > 0.0 ? gamma * std::pow(q, gamma - 1.0) * logp : 0.0;
  const double log_term = clamped ? 0.0 : focal_modulation(p, gamma) / p;
  return mod_term - log_term;
}

double weighted_mean(const Tensor& probs, const LabelMap& labels, double gamma,
                     std::span<const double> weights) {
  check_inputs(probs, labels, weights);
  const int c = probs.shape().c;
  const std::size_t px = probs.shape().pixels();
  double total = 0.0;
  for (std::size_t i = 0; i < px; ++i) {
    const int y = labels.labels[i];
    double term = pixel_term(probs[i * c + y], gamma);
    if (!weights.empty()) term *= weights[y];
    total += term;
  }
  const double loss = total / static_cast<double>(px);
  if (!std::isfinite(loss)) throw NumericError("dense loss: non-finite value");
  return loss;
}

}  // namespace

double focal_modulation(double p, double gamma) {
  if (gamma == 0.0) return 1.0;
  return std::pow(std::max(1.0 - p, 0.0), gamma);
}

double dense_nll_loss(const Tensor& probs, const LabelMap& labels) {
  return weighted_mean(probs, labels, 0.0, {});
}

double focal_dense_loss(const Tensor& probs, const LabelMap& labels, double gamma,
                        std::span<const double> class_weights) {
  if (gamma < 0.0) throw ConfigError("focal loss: gamma must be >= 0");
  return weighted_mean(probs, labels, gamma, class_weights);
}

Tensor dense_loss_grad(const Tensor& probs, const LabelMap& labels, double gamma,
                       std::span<const double> class_weights) {
  check_inputs(probs, labels, class_weights);
  const int c = probs.shape().c;
  const std::size_t px = probs.shape().pixels();
  const double inv_count = 1.0 / static_cast<double>(px);
  Tensor g(probs.shape());
  for (std::size_t i = 0; i < px; ++i) {
    const int y = labels.labels[i];
    double d = pixel_grad(probs[i * c + y], gamma) * inv_count;
    if (!class_weights.empty()) d *= class_weights[y];
    g[i * c + y] = static_cast<real_t>(d);
  }
  return g;
}

}  // namespace cloudifier::ops
