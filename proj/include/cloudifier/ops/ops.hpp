#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cloudifier/tensor.hpp"

// Pure tensor operations with their hand-written adjoints. None of these
// mutate their inputs; every result is freshly allocated.
namespace cloudifier::ops {

enum class Padding { Same, Valid };

// Geometry shared by a correlation and its adjoint. The "large" side is the
// conv input (transposed-conv output); the "small" side is the conv output.
struct ConvGeometry {
  int large_h = 0, large_w = 0;
  int small_h = 0, small_w = 0;
  int kh = 1, kw = 1;
  int stride = 1;
  int pad_top = 0, pad_left = 0;

  // Same: small = ceil(large / stride), pad = (k - 1) / 2.
  // Valid: small = (large - k) / stride + 1, pad = 0.
  static ConvGeometry for_conv(int h, int w, int kh, int kw, int stride, Padding padding);
  // large = small * stride.
  static ConvGeometry for_transpose(int h, int w, int kh, int kw, int stride, int pad);
};

struct ConvParams {
  Tensor kernel;  // (kh, kw, c_in, c_out)
  Tensor bias;    // (1, 1, 1, c_out), or empty for no bias
  int stride = 1;
  Padding padding = Padding::Same;
};

struct ConvGrads {
  Tensor dx;
  Tensor dkernel;
  Tensor dbias;  // empty when the conv has no bias
};

Tensor conv2d(const Tensor& x, const ConvParams& p);
ConvGrads conv2d_backward(const Tensor& x, const ConvParams& p, const Tensor& dy);

// Per-channel spatial filter; kernel shape (kh, kw, 1, c).
Tensor depthwise_conv2d(const Tensor& x, const Tensor& kernel, int stride, Padding padding);
struct DepthwiseGrads {
  Tensor dx;
  Tensor dkernel;
};
DepthwiseGrads depthwise_conv2d_backward(const Tensor& x, const Tensor& kernel, int stride,
                                         Padding padding, const Tensor& dy);

struct SeparableParams {
  Tensor depthwise;  // (kh, kw, 1, c_in)
  Tensor pointwise;  // (1, 1, c_in, c_out)
  Tensor bias;       // (1, 1, 1, c_out) or empty
  int stride = 1;    // applies to the depthwise stage
};
Tensor depthwise_separable_conv2d(const Tensor& x, const SeparableParams& p);
std::size_t parameter_count(const SeparableParams& p);

struct TransposeParams {
  Tensor kernel;  // (kh, kw, c_out, c_in): the kernel of the conv this is the adjoint of
  Tensor bias;    // (1, 1, 1, c_out) or empty
  int stride = 1;
  int pad = -1;   // -1 selects (k - stride) / 2, which makes the output exactly input * stride
};
int resolved_transpose_pad(const TransposeParams& p);
Tensor conv2d_transpose(const Tensor& x, const TransposeParams& p);
ConvGrads conv2d_transpose_backward(const Tensor& x, const TransposeParams& p, const Tensor& dy);

enum class BnMode { Train, Infer };

struct BatchNormParams {
  Tensor gamma;  // (1, 1, 1, c)
  Tensor beta;
  Tensor running_mean;
  Tensor running_var;
  real_t eps = real_t(1e-5);
  real_t momentum = real_t(0.9);  // running <- momentum * running + (1 - momentum) * batch
};

struct BatchNormResult {
  Tensor y;
  Tensor x_hat;                  // normalized input, kept for the backward pass
  std::vector<double> inv_std;   // per channel
  std::vector<double> batch_mean;  // empty in infer mode
  std::vector<double> batch_var;   // biased; empty in infer mode
};
BatchNormResult batch_norm(const Tensor& x, const BatchNormParams& p, BnMode mode);
// Running statistics after absorbing one train-mode batch.
void update_running_stats(BatchNormParams& p, const BatchNormResult& r);

struct BatchNormGrads {
  Tensor dx;
  Tensor dgamma;
  Tensor dbeta;
};
BatchNormGrads batch_norm_backward(const BatchNormResult& fwd, const Tensor& gamma, BnMode mode,
                                   const Tensor& dy);

Tensor relu(const Tensor& x);
// Subgradient 0 at x <= 0.
Tensor relu_backward(const Tensor& x, const Tensor& dy);
Tensor add(const Tensor& a, const Tensor& b);
Tensor concat_channels(std::span<const Tensor* const> parts);
std::vector<Tensor> split_channels(const Tensor& t, std::span<const int> widths);

Tensor softmax_per_fiber(const Tensor& logits);
Tensor softmax_backward(const Tensor& probs, const Tensor& dprobs);

// Dense class-index map aligned with the (n, h, w) extent of a probability tensor.
struct LabelMap {
  int n = 0, h = 0, w = 0;
  std::vector<std::uint16_t> labels;

  std::uint16_t operator()(int b, int y, int x) const {
    return labels[(static_cast<std::size_t>(b) * h + y) * w + x];
  }
};

// Probabilities are clamped to this floor before the log.
inline constexpr double kProbFloor = 1e-12;

// -(1/(N*H*W)) * sum log p(true class)
double dense_nll_loss(const Tensor& probs, const LabelMap& labels);
// Same normalization, per-pixel term -alpha_y * (1 - p_y)^gamma * log p_y.
// gamma == 0 with no weights is evaluated by the exact NLL code path.
double focal_dense_loss(const Tensor& probs, const LabelMap& labels, double gamma,
                        std::span<const double> class_weights = {});
// d loss / d probs for either loss (NLL when gamma == 0 and no weights).
Tensor dense_loss_grad(const Tensor& probs, const LabelMap& labels, double gamma,
                       std::span<const double> class_weights = {});

// The focal modulating factor (1 - p)^gamma.
double focal_modulation(double p, double gamma);

}  // namespace cloudifier::ops
