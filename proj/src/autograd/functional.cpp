#include "cloudifier/autograd/functional.hpp"

#include <algorithm>

namespace cloudifier::ag {
namespace {

Tensor bias_or_empty(const Variable& bias) { return bias.defined() ? bias.value() : Tensor(); }

std::vector<Variable> with_optional(std::vector<Variable> inputs, const Variable& extra) {
  if (extra.defined()) inputs.push_back(extra);
  return inputs;
}

}  // namespace

Variable conv2d(Tape& tape, const Variable& x, const Variable& kernel, const Variable& bias,
                int stride, Padding padding) {
  ops::ConvParams p{kernel.value(), bias_or_empty(bias), stride, padding};
  Tensor y = ops::conv2d(x.value(), p);
  return tape.record("conv2d", with_optional({x, kernel}, bias), std::move(y),
                     [x, kernel, bias, p = std::move(p)](const Tensor& dy) mutable {
                       auto g = ops::conv2d_backward(x.value(), p, dy);
                       if (x.requires_grad()) x.accumulate_grad(g.dx);
                       if (kernel.requires_grad()) kernel.accumulate_grad(g.dkernel);
                       if (bias.defined() && bias.requires_grad()) bias.accumulate_grad(g.dbias);
                     });
}

Variable depthwise_conv2d(Tape& tape, const Variable& x, const Variable& kernel, int stride) {
  Tensor y = ops::depthwise_conv2d(x.value(), kernel.value(), stride, Padding::Same);
  return tape.record("depthwise_conv2d", {x, kernel}, std::move(y),
                     [x, kernel, stride](const Tensor& dy) mutable {
                       auto g = ops::depthwise_conv2d_backward(x.value(), kernel.value(), stride,
                                                               Padding::Same, dy);
                       if (x.requires_grad()) x.accumulate_grad(g.dx);
                       if (kernel.requires_grad()) kernel.accumulate_grad(g.dkernel);
                     });
}

Variable conv2d_transpose(Tape& tape, const Variable& x, const Variable& kernel,
                          const Variable& bias, int stride, int pad) {
  ops::TransposeParams p{kernel.value(), bias_or_empty(bias), stride, pad};
  Tensor y = ops::conv2d_transpose(x.value(), p);
  return tape.record("conv2d_transpose", with_optional({x, kernel}, bias), std::move(y),
                     [x, kernel, bias, p = std::move(p)](const Tensor& dy) mutable {
                       auto g = ops::conv2d_transpose_backward(x.value(), p, dy);
                       if (x.requires_grad()) x.accumulate_grad(g.dx);
                       if (kernel.requires_grad()) kernel.accumulate_grad(g.dkernel);
                       if (bias.defined() && bias.requires_grad()) bias.accumulate_grad(g.dbias);
                     });
}

Variable batch_norm(Tape& tape, const Variable& x, BatchNormState& state, BnMode mode) {
  ops::BatchNormParams p{state.gamma.value(), state.beta.value(), state.running_mean.value(),
                         state.running_var.value(), state.eps, state.momentum};
  auto fwd = std::make_shared<ops::BatchNormResult>(ops::batch_norm(x.value(), p, mode));
  if (mode == BnMode::Train) {
    ops::update_running_stats(p, *fwd);
    state.running_mean.mutable_value() = p.running_mean;
    state.running_var.mutable_value() = p.running_var;
  }
  Tensor y = fwd->y;
  Variable gamma = state.gamma;
  Variable beta = state.beta;
  return tape.record("batch_norm", {x, gamma, beta}, std::move(y),
                     [x, gamma, beta, fwd, mode](const Tensor& dy) mutable {
                       auto g = ops::batch_norm_backward(*fwd, gamma.value(), mode, dy);
                       if (x.requires_grad()) x.accumulate_grad(g.dx);
                       if (gamma.requires_grad()) gamma.accumulate_grad(g.dgamma);
                       if (beta.requires_grad()) beta.accumulate_grad(g.dbeta);
                     });
}

Variable relu(Tape& tape, const Variable& x) {
  return tape.record("relu", {x}, ops::relu(x.value()), [x](const Tensor& dy) mutable {
    x.accumulate_grad(ops::relu_backward(x.value(), dy));
  });
}

Variable add(Tape& tape, const Variable& a, const Variable& b) {
  return tape.record("add", {a, b}, ops::add(a.value(), b.value()),
                     [a, b](const Tensor& dy) mutable {
                       if (a.requires_grad()) a.accumulate_grad(dy);
                       if (b.requires_grad()) b.accumulate_grad(dy);
                     });
}

Variable concat_channels(Tape& tape, std::span<const Variable> parts) {
  std::vector<const Tensor*> values;
  std::vector<int> widths;
  for (const auto& v : parts) {
    values.push_back(&v.value());
    widths.push_back(v.shape().c);
  }
  Tensor y = ops::concat_channels(values);
  std::vector<Variable> inputs(parts.begin(), parts.end());
  return tape.record("concat_channels", inputs, std::move(y),
                     [inputs, widths](const Tensor& dy) mutable {
                       auto pieces = ops::split_channels(dy, widths);
                       for (std::size_t i = 0; i < inputs.size(); ++i) {
                         if (inputs[i].requires_grad()) inputs[i].accumulate_grad(pieces[i]);
                       }
                     });
}

Variable softmax_per_fiber(Tape& tape, const Variable& logits) {
  auto probs = std::make_shared<Tensor>(ops::softmax_per_fiber(logits.value()));
  Tensor y = *probs;
  return tape.record("softmax_per_fiber", {logits}, std::move(y),
                     [logits, probs](const Tensor& dp) mutable {
                       logits.accumulate_grad(ops::softmax_backward(*probs, dp));
                     });
}

Variable dense_loss(Tape& tape, const Variable& probs, const ops::LabelMap& labels, double gamma,
                    std::span<const double> class_weights) {
  const double loss = gamma == 0.0 && class_weights.empty()
                          ? ops::dense_nll_loss(probs.value(), labels)
                          : ops::focal_dense_loss(probs.value(), labels, gamma, class_weights);
  std::vector<double> weights(class_weights.begin(), class_weights.end());
  return tape.record("dense_loss", {probs}, Tensor::scalar(static_cast<real_t>(loss)),
                     [probs, labels, gamma, weights](const Tensor& dl) mutable {
                       Tensor g = ops::dense_loss_grad(probs.value(), labels, gamma, weights);
                       const real_t s = dl[0];
                       if (s != real_t{1})
                         for (auto& v : g.data()) v *= s;
                       probs.accumulate_grad(g);
                     });
}

Variable sum(Tape& tape, const Variable& x) {
  double total = 0.0;
  for (real_t v : x.value().data()) total += v;
  return tape.record("sum", {x}, Tensor::scalar(static_cast<real_t>(total)),
                     [x](const Tensor& dl) mutable { x.accumulate_grad(Tensor(x.shape(), dl[0])); });
}

Variable weighted_sum(Tape& tape, const Variable& x, const Tensor& weights) {
  require_same_shape(x.shape(), weights.shape(), "weighted_sum");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    total += static_cast<double>(x.value()[i]) * weights[i];
  return tape.record("weighted_sum", {x}, Tensor::scalar(static_cast<real_t>(total)),
                     [x, weights](const Tensor& dl) mutable {
                       Tensor g = weights;
                       for (auto& v : g.data()) v *= dl[0];
                       x.accumulate_grad(g);
                     });
}

}  // namespace cloudifier::ag
