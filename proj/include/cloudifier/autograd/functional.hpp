#pragma once

#include <span>
#include <vector>

#include "cloudifier/autograd/tape.hpp"
#include "cloudifier/ops/ops.hpp"

// Differentiable wrappers over cloudifier::ops. Each records its adjoint on
// the tape when any input requires a gradient.
namespace cloudifier::ag {

using ops::BnMode;
using ops::Padding;

// `bias` may be an undefined Variable for a bias-free conv.
Variable conv2d(Tape& tape, const Variable& x, const Variable& kernel, const Variable& bias,
                int stride = 1, Padding padding = Padding::Same);
Variable depthwise_conv2d(Tape& tape, const Variable& x, const Variable& kernel, int stride = 1);
Variable conv2d_transpose(Tape& tape, const Variable& x, const Variable& kernel,
                          const Variable& bias, int stride, int pad = -1);

// Trainable scale/shift plus running statistics (never differentiated).
struct BatchNormState {
  Variable gamma;
  Variable beta;
  Variable running_mean;
  Variable running_var;
  real_t eps = real_t(1e-5);
  real_t momentum = real_t(0.9);
};
// Train mode also folds the batch statistics into the running statistics.
Variable batch_norm(Tape& tape, const Variable& x, BatchNormState& state, BnMode mode);

Variable relu(Tape& tape, const Variable& x);
Variable add(Tape& tape, const Variable& a, const Variable& b);
Variable concat_channels(Tape& tape, std::span<const Variable> parts);
Variable softmax_per_fiber(Tape& tape, const Variable& logits);

// Dense cross-entropy (gamma == 0, no weights) or focal loss over probabilities.
Variable dense_loss(Tape& tape, const Variable& probs, const ops::LabelMap& labels,
                    double gamma = 0.0, std::span<const double> class_weights = {});

Variable sum(Tape& tape, const Variable& x);
// sum(x * weights) for a constant tensor; used to project outputs to a scalar.
Variable weighted_sum(Tape& tape, const Variable& x, const Tensor& weights);

}  // namespace cloudifier::ag
