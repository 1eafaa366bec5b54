#include <algorithm>
#include <string>

#include "cloudifier/ops/ops.hpp"
#include "cloudifier/simd/kernels.hpp"

namespace cloudifier::ops {
namespace {

// Upper bound on the im2col scratch buffer, in elements.
constexpr std::size_t kTileElems = std::size_t{1} << 18;

int ceil_div(int a, int b) { return (a + b - 1) / b; }

void check_kernel_dims(int kh, int kw, int stride, const char* op) {
  if (kh <= 0 || kw <= 0) throw ShapeError(std::string(op) + ": empty kernel");
  if (stride < 1) throw ConfigError(std::string(op) + ": stride must be >= 1");
}

bool is_pointwise(const ConvGeometry& g) {
  return g.kh == 1 && g.kw == 1 && g.stride == 1 && g.pad_top == 0 && g.pad_left == 0 &&
         g.large_h == g.small_h && g.large_w == g.small_w;
}

int rows_per_tile(const ConvGeometry& g, int k_len) {
  const std::size_t row_elems = static_cast<std::size_t>(g.small_w) * k_len;
  return static_cast<int>(std::clamp<std::size_t>(kTileElems / std::max<std::size_t>(row_elems, 1),
                                                  1, static_cast<std::size_t>(g.small_h)));
}

// Gathers receptive fields of small rows [r0, r1) into `cols`, one row per
// small pixel, (a, b, c) ordered to match a (kh, kw, c, *) kernel.
void im2col(const real_t* large, const ConvGeometry& g, int c, int r0, int r1, real_t* cols) {
  const int k_len = g.kh * g.kw * c;
  for (int oy = r0; oy < r1; ++oy) {
    for (int ox = 0; ox < g.small_w; ++ox) {
      real_t* dst = cols + (static_cast<std::size_t>(oy - r0) * g.small_w + ox) * k_len;
      for (int a = 0; a < g.kh; ++a) {
        const int iy = oy * g.stride - g.pad_top + a;
        for (int b = 0; b < g.kw; ++b) {
          const int ix = ox * g.stride - g.pad_left + b;
          real_t* d = dst + (a * g.kw + b) * c;
          if (iy < 0 || iy >= g.large_h || ix < 0 || ix >= g.large_w) {
            std::fill(d, d + c, real_t{0});
          } else {
            const real_t* s = large + (static_cast<std::size_t>(iy) * g.large_w + ix) * c;
            std::copy(s, s + c, d);
          }
        }
      }
    }
  }
}

// Scatter-adds `cols` back onto the large grid (adjoint of im2col).
void col2im(const real_t* cols, const ConvGeometry& g, int c, int r0, int r1, real_t* large) {
  const int k_len = g.kh * g.kw * c;
  for (int oy = r0; oy < r1; ++oy) {
    for (int ox = 0; ox < g.small_w; ++ox) {
      const real_t* src = cols + (static_cast<std::size_t>(oy - r0) * g.small_w + ox) * k_len;
      for (int a = 0; a < g.kh; ++a) {
        const int iy = oy * g.stride - g.pad_top + a;
        if (iy < 0 || iy >= g.large_h) continue;
        for (int b = 0; b < g.kw; ++b) {
          const int ix = ox * g.stride - g.pad_left + b;
          if (ix < 0 || ix >= g.large_w) continue;
          const real_t* s = src + (a * g.kw + b) * c;
          real_t* d = large + (static_cast<std::size_t>(iy) * g.large_w + ix) * c;
          for (int ch = 0; ch < c; ++ch) d[ch] += s[ch];
        }
      }
    }
  }
}

// small += correlate(large, wmat); wmat is (kh*kw*c_large) x c_small.
void correlate(const real_t* large, const ConvGeometry& g, int c_large, const real_t* wmat,
               int c_small, real_t* small, std::vector<real_t>& scratch) {
  const auto& kern = simd::kernels();
  if (is_pointwise(g)) {
    kern.gemm(g.small_h * g.small_w, c_small, c_large, large, c_large, 1, wmat, c_small, small,
              c_small);
    return;
  }
  const int k_len = g.kh * g.kw * c_large;
  const int tile = rows_per_tile(g, k_len);
  scratch.resize(static_cast<std::size_t>(tile) * g.small_w * k_len);
  for (int r0 = 0; r0 < g.small_h; r0 += tile) {
    const int r1 = std::min(g.small_h, r0 + tile);
    im2col(large, g, c_large, r0, r1, scratch.data());
    kern.gemm((r1 - r0) * g.small_w, c_small, k_len, scratch.data(), k_len, 1, wmat, c_small,
              small + static_cast<std::size_t>(r0) * g.small_w * c_small, c_small);
  }
}

// large += adjoint of correlate applied to `small`; wmat_t is c_small x (kh*kw*c_large).
void correlate_adjoint(const real_t* small, const ConvGeometry& g, int c_small,
                       const real_t* wmat_t, int c_large, real_t* large,
                       std::vector<real_t>& scratch) {
  const auto& kern = simd::kernels();
  if (is_pointwise(g)) {
    kern.gemm(g.small_h * g.small_w, c_large, c_small, small, c_small, 1, wmat_t, c_large, large,
              c_large);
    return;
  }
  const int k_len = g.kh * g.kw * c_large;
  const int tile = rows_per_tile(g, k_len);
  scratch.resize(static_cast<std::size_t>(tile) * g.small_w * k_len);
  for (int r0 = 0; r0 < g.small_h; r0 += tile) {
    const int r1 = std::min(g.small_h, r0 + tile);
    const std::size_t m = static_cast<std::size_t>(r1 - r0) * g.small_w;
    std::fill(scratch.begin(), scratch.begin() + m * k_len, real_t{0});
    kern.gemm(static_cast<int>(m), k_len, c_small,
              small + static_cast<std::size_t>(r0) * g.small_w * c_small, c_small, 1, wmat_t,
              k_len, scratch.data(), k_len);
    col2im(scratch.data(), g, c_large, r0, r1, large);
  }
}

// dw += im2col(large)^T * dsmall; dw is (kh*kw*c_large) x c_small.
void correlate_weight_grad(const real_t* large, const ConvGeometry& g, int c_large,
                           const real_t* dsmall, int c_small, real_t* dw,
                           std::vector<real_t>& scratch) {
  const auto& kern = simd::kernels();
  if (is_pointwise(g)) {
    kern.gemm(c_large, c_small, g.small_h * g.small_w, large, 1, c_large, dsmall, c_small, dw,
              c_small);
    return;
  }
  const int k_len = g.kh * g.kw * c_large;
  const int tile = rows_per_tile(g, k_len);
  scratch.resize(static_cast<std::size_t>(tile) * g.small_w * k_len);
  for (int r0 = 0; r0 < g.small_h; r0 += tile) {
    const int r1 = std::min(g.small_h, r0 + tile);
    const int m = (r1 - r0) * g.small_w;
    im2col(large, g, c_large, r0, r1, scratch.data());
    kern.gemm(k_len, c_small, m, scratch.data(), 1, k_len,
              dsmall + static_cast<std::size_t>(r0) * g.small_w * c_small, c_small, dw, c_small);
  }
}

// Row-major (rows x cols) -> (cols x rows).
std::vector<real_t> transpose_matrix(const real_t* src, int rows, int cols) {
  std::vector<real_t> out(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out[static_cast<std::size_t>(c) * rows + r] = src[static_cast<std::size_t>(r) * cols + c];
  return out;
}

void add_bias(Tensor& y, const Tensor& bias) {
  if (bias.empty()) return;
  const int c = y.shape().c;
  const std::size_t px = y.shape().pixels();
  const auto& kern = simd::kernels();
  for (std::size_t i = 0; i < px; ++i) kern.add(c, y.ptr() + i * c, bias.ptr(), y.ptr() + i * c);
}

Tensor bias_grad(const Tensor& dy) {
  const int c = dy.shape().c;
  std::vector<double> acc(c, 0.0);
  const std::size_t px = dy.shape().pixels();
  for (std::size_t i = 0; i < px; ++i)
    for (int ch = 0; ch < c; ++ch) acc[ch] += dy[i * c + ch];
  Tensor out(Shape::vec(c));
  for (int ch = 0; ch < c; ++ch) out[ch] = static_cast<real_t>(acc[ch]);
  return out;
}

void check_bias(const Tensor& bias, int c_out, const char* op) {
  if (!bias.empty() && bias.shape() != Shape::vec(c_out)) {
    throw ShapeError(std::string(op) + ": bias shape " + bias.shape().str() + " vs expected " +
                     Shape::vec(c_out).str());
  }
}

void check_conv(const Tensor& x, const ConvParams& p) {
  const Shape& ks = p.kernel.shape();
  check_kernel_dims(ks.n, ks.h, p.stride, "conv2d");
  if (x.shape().c != ks.w) {
    throw ShapeError("conv2d: input " + x.shape().str() + " has " + std::to_string(x.shape().c) +
                     " channels but kernel " + ks.str() + " expects " + std::to_string(ks.w));
  }
  if (p.padding == Padding::Same && (ks.n % 2 == 0 || ks.h % 2 == 0)) {
    throw ShapeError("conv2d: same padding requires an odd kernel, got " + ks.str());
  }
  check_bias(p.bias, ks.c, "conv2d");
}

}  // namespace

ConvGeometry ConvGeometry::for_conv(int h, int w, int kh, int kw, int stride, Padding padding) {
  ConvGeometry g;
  g.large_h = h;
  g.large_w = w;
  g.kh = kh;
  g.kw = kw;
  g.stride = stride;
  if (padding == Padding::Same) {
    g.small_h = ceil_div(h, stride);
    g.small_w = ceil_div(w, stride);
    g.pad_top = (kh - 1) / 2;
    g.pad_left = (kw - 1) / 2;
  } else {
    if (h < kh || w < kw) {
      throw ShapeError("valid conv: input " + std::to_string(h) + "x" + std::to_string(w) +
                       " smaller than kernel " + std::to_string(kh) + "x" + std::to_string(kw));
    }
    g.small_h = (h - kh) / stride + 1;
    g.small_w = (w - kw) / stride + 1;
  }
  return g;
}

ConvGeometry ConvGeometry::for_transpose(int h, int w, int kh, int kw, int stride, int pad) {
  ConvGeometry g;
  g.small_h = h;
  g.small_w = w;
  g.large_h = h * stride;
  g.large_w = w * stride;
  g.kh = kh;
  g.kw = kw;
  g.stride = stride;
  g.pad_top = pad;
  g.pad_left = pad;
  return g;
}

Tensor conv2d(const Tensor& x, const ConvParams& p) {
  check_conv(x, p);
  const Shape& xs = x.shape();
  const Shape& ks = p.kernel.shape();
  const auto g = ConvGeometry::for_conv(xs.h, xs.w, ks.n, ks.h, p.stride, p.padding);
  Tensor y(Shape{xs.n, g.small_h, g.small_w, ks.c});
  std::vector<real_t> scratch;
  const std::size_t in_img = static_cast<std::size_t>(xs.h) * xs.w * xs.c;
  const std::size_t out_img = static_cast<std::size_t>(g.small_h) * g.small_w * ks.c;
  for (int n = 0; n < xs.n; ++n) {
    correlate(x.ptr() + n * in_img, g, xs.c, p.kernel.ptr(), ks.c, y.ptr() + n * out_img, scratch);
  }
  add_bias(y, p.bias);
  require_finite(y, "conv2d");
  return y;
}

ConvGrads conv2d_backward(const Tensor& x, const ConvParams& p, const Tensor& dy) {
  check_conv(x, p);
  const Shape& xs = x.shape();
  const Shape& ks = p.kernel.shape();
  const auto g = ConvGeometry::for_conv(xs.h, xs.w, ks.n, ks.h, p.stride, p.padding);
  require_same_shape(dy.shape(), Shape{xs.n, g.small_h, g.small_w, ks.c}, "conv2d_backward");
  ConvGrads grads{Tensor(xs), Tensor(ks), Tensor()};
  const int k_len = ks.n * ks.h * ks.w;
  const auto wmat_t = transpose_matrix(p.kernel.ptr(), k_len, ks.c);
  std::vector<real_t> scratch;
  const std::size_t in_img = static_cast<std::size_t>(xs.h) * xs.w * xs.c;
  const std::size_t out_img = static_cast<std::size_t>(g.small_h) * g.small_w * ks.c;
  for (int n = 0; n < xs.n; ++n) {
    correlate_adjoint(dy.ptr() + n * out_img, g, ks.c, wmat_t.data(), xs.c,
                      grads.dx.ptr() + n * in_img, scratch);
    correlate_weight_grad(x.ptr() + n * in_img, g, xs.c, dy.ptr() + n * out_img, ks.c,
                          grads.dkernel.ptr(), scratch);
  }
  if (!p.bias.empty()) grads.dbias = bias_grad(dy);
  return grads;
}

Tensor depthwise_conv2d(const Tensor& x, const Tensor& kernel, int stride, Padding padding) {
  const Shape& xs = x.shape();
  const Shape& ks = kernel.shape();
  check_kernel_dims(ks.n, ks.h, stride, "depthwise_conv2d");
  if (ks.w != 1 || ks.c != xs.c) {
    throw ShapeError("depthwise_conv2d: kernel " + ks.str() + " incompatible with input " + xs.str());
  }
  const auto g = ConvGeometry::for_conv(xs.h, xs.w, ks.n, ks.h, stride, padding);
  Tensor y(Shape{xs.n, g.small_h, g.small_w, xs.c});
  const auto& kern = simd::kernels();
  const int c = xs.c;
  for (int n = 0; n < xs.n; ++n)
    for (int oy = 0; oy < g.small_h; ++oy)
      for (int ox = 0; ox < g.small_w; ++ox) {
        real_t* out = &y(n, oy, ox, 0);
        for (int a = 0; a < g.kh; ++a) {
          const int iy = oy * stride - g.pad_top + a;
          if (iy < 0 || iy >= xs.h) continue;
          for (int b = 0; b < g.kw; ++b) {
            const int ix = ox * stride - g.pad_left + b;
            if (ix < 0 || ix >= xs.w) continue;
            kern.mul_add(c, x.ptr() + x.index(n, iy, ix, 0), kernel.ptr() + (a * g.kw + b) * c, out);
          }
        }
      }
  require_finite(y, "depthwise_conv2d");
  return y;
}

DepthwiseGrads depthwise_conv2d_backward(const Tensor& x, const Tensor& kernel, int stride,
                                         Padding padding, const Tensor& dy) {
  const Shape& xs = x.shape();
  const Shape& ks = kernel.shape();
  const auto g = ConvGeometry::for_conv(xs.h, xs.w, ks.n, ks.h, stride, padding);
  require_same_shape(dy.shape(), Shape{xs.n, g.small_h, g.small_w, xs.c},
                     "depthwise_conv2d_backward");
  DepthwiseGrads grads{Tensor(xs), Tensor(ks)};
  const auto& kern = simd::kernels();
  const int c = xs.c;
  for (int n = 0; n < xs.n; ++n)
    for (int oy = 0; oy < g.small_h; ++oy)
      for (int ox = 0; ox < g.small_w; ++ox) {
        const real_t* d = dy.ptr() + dy.index(n, oy, ox, 0);
        for (int a = 0; a < g.kh; ++a) {
          const int iy = oy * stride - g.pad_top + a;
          if (iy < 0 || iy >= xs.h) continue;
          for (int b = 0; b < g.kw; ++b) {
            const int ix = ox * stride - g.pad_left + b;
            if (ix < 0 || ix >= xs.w) continue;
            const std::size_t koff = static_cast<std::size_t>(a * g.kw + b) * c;
            kern.mul_add(c, d, kernel.ptr() + koff, &grads.dx(n, iy, ix, 0));
            kern.mul_add(c, d, x.ptr() + x.index(n, iy, ix, 0), grads.dkernel.ptr() + koff);
          }
        }
      }
  return grads;
}

Tensor depthwise_separable_conv2d(const Tensor& x, const SeparableParams& p) {
  const Tensor mid = depthwise_conv2d(x, p.depthwise, p.stride, Padding::Same);
  return conv2d(mid, ConvParams{p.pointwise, p.bias, 1, Padding::Same});
}

std::size_t parameter_count(const SeparableParams& p) {
  return p.depthwise.size() + p.pointwise.size() + p.bias.size();
}

int resolved_transpose_pad(const TransposeParams& p) {
  if (p.pad >= 0) return p.pad;
  const int k = p.kernel.shape().n;
  if (k < p.stride || (k - p.stride) % 2 != 0) {
    throw ShapeError("conv2d_transpose: kernel " + std::to_string(k) + " with stride " +
                     std::to_string(p.stride) + " cannot restore an exact input*stride size");
  }
  return (k - p.stride) / 2;
}

namespace {
void check_transpose(const Tensor& x, const TransposeParams& p) {
  const Shape& ks = p.kernel.shape();
  check_kernel_dims(ks.n, ks.h, p.stride, "conv2d_transpose");
  if (x.shape().c != ks.c) {
    throw ShapeError("conv2d_transpose: input " + x.shape().str() + " has " +
                     std::to_string(x.shape().c) + " channels but kernel " + ks.str() +
                     " expects " + std::to_string(ks.c));
  }
  check_bias(p.bias, ks.w, "conv2d_transpose");
}
}  // namespace

Tensor conv2d_transpose(const Tensor& x, const TransposeParams& p) {
  check_transpose(x, p);
  const Shape& xs = x.shape();
  const Shape& ks = p.kernel.shape();
  const auto g =
      ConvGeometry::for_transpose(xs.h, xs.w, ks.n, ks.h, p.stride, resolved_transpose_pad(p));
  const int c_out = ks.w;
  Tensor y(Shape{xs.n, g.large_h, g.large_w, c_out});
  const int k_len = ks.n * ks.h * c_out;
  const auto wmat_t = transpose_matrix(p.kernel.ptr(), k_len, ks.c);
  std::vector<real_t> scratch;
  const std::size_t in_img = static_cast<std::size_t>(xs.h) * xs.w * xs.c;
  const std::size_t out_img = static_cast<std::size_t>(g.large_h) * g.large_w * c_out;
  for (int n = 0; n < xs.n; ++n) {
    correlate_adjoint(x.ptr() + n * in_img, g, xs.c, wmat_t.data(), c_out, y.ptr() + n * out_img,
                      scratch);
  }
  add_bias(y, p.bias);
  require_finite(y, "conv2d_transpose");
  return y;
}

ConvGrads conv2d_transpose_backward(const Tensor& x, const TransposeParams& p, const Tensor& dy) {
  check_transpose(x, p);
  const Shape& xs = x.shape();
  const Shape& ks = p.kernel.shape();
  const auto g =
      ConvGeometry::for_transpose(xs.h, xs.w, ks.n, ks.h, p.stride, resolved_transpose_pad(p));
  const int c_out = ks.w;
  require_same_shape(dy.shape(), Shape{xs.n, g.large_h, g.large_w, c_out},
                     "conv2d_transpose_backward");
  ConvGrads grads{Tensor(xs), Tensor(ks), Tensor()};
  std::vector<real_t> scratch;
  const std::size_t in_img = static_cast<std::size_t>(xs.h) * xs.w * xs.c;
  const std::size_t out_img = static_cast<std::size_t>(g.large_h) * g.large_w * c_out;
  for (int n = 0; n < xs.n; ++n) {
    correlate(dy.ptr() + n * out_img, g, c_out, p.kernel.ptr(), xs.c, grads.dx.ptr() + n * in_img,
              scratch);
    correlate_weight_grad(dy.ptr() + n * out_img, g, c_out, x.ptr() + n * in_img, xs.c,
                          grads.dkernel.ptr(), scratch);
  }
  if (!p.bias.empty()) grads.dbias = bias_grad(dy);
  return grads;
}

}  // namespace cloudifier::ops
