#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cloudifier/ops/ops.hpp"
#include "cloudifier/simd/kernels.hpp"

namespace cloudifier::ops {

Tensor relu(const Tensor& x) {
  Tensor y(x.shape());
  simd::kernels().relu(x.size(), x.ptr(), y.ptr());
  return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& dy) {
  require_same_shape(x.shape(), dy.shape(), "relu_backward");
  Tensor dx(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] > real_t{0} ? dy[i] : real_t{0};
  return dx;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a.shape(), b.shape(), "add");
  Tensor y(a.shape());
  simd::kernels().add(a.size(), a.ptr(), b.ptr(), y.ptr());
  return y;
}

Tensor concat_channels(std::span<const Tensor* const> parts) {
  if (parts.empty()) throw ShapeError("concat_channels: no inputs");
  const Shape& first = parts.front()->shape();
  int total = 0;
  for (const Tensor* t : parts) {
    const Shape& s = t->shape();
    if (s.n != first.n || s.h != first.h || s.w != first.w) {
      throw ShapeError("concat_channels: spatial mismatch " + first.str() + " vs " + s.str());
    }
    total += s.c;
  }
  Tensor y(Shape{first.n, first.h, first.w, total});
  const std::size_t px = first.pixels();
  for (std::size_t i = 0; i < px; ++i) {
    real_t* dst = y.ptr() + i * total;
    for (const Tensor* t : parts) {
      const int c = t->shape().c;
      std::copy_n(t->ptr() + i * c, c, dst);
      dst += c;
    }
  }
  return y;
}

std::vector<Tensor> split_channels(const Tensor& t, std::span<const int> widths) {
  const Shape& s = t.shape();
  if (std::accumulate(widths.begin(), widths.end(), 0) != s.c) {
    throw ShapeError("split_channels: widths do not sum to channel count of " + s.str());
  }
  std::vector<Tensor> out;
  out.reserve(widths.size());
  for (int w : widths) out.emplace_back(Shape{s.n, s.h, s.w, w});
  const std::size_t px = s.pixels();
  for (std::size_t i = 0; i < px; ++i) {
    const real_t* src = t.ptr() + i * s.c;
    for (std::size_t k = 0; k < widths.size(); ++k) {
      std::copy_n(src, widths[k], out[k].ptr() + i * widths[k]);
      src += widths[k];
    }
  }
  return out;
}

Tensor softmax_per_fiber(const Tensor& logits) {
  const Shape& s = logits.shape();
  if (s.c < 2) throw ShapeError("softmax_per_fiber: need at least 2 classes, got " + s.str());
  Tensor p(s);
  const std::size_t px = s.pixels();
  const int c = s.c;
  for (std::size_t i = 0; i < px; ++i) {
    const real_t* z = logits.ptr() + i * c;
    real_t* out = p.ptr() + i * c;
    const real_t zmax = *std::max_element(z, z + c);
    double sum = 0.0;
    for (int k = 0; k < c; ++k) {
      const double e = std::exp(static_cast<double>(z[k]) - zmax);
      out[k] = static_cast<real_t>(e);
      sum += e;
    }
    const double inv = 1.0 / sum;
    for (int k = 0; k < c; ++k) out[k] = static_cast<real_t>(out[k] * inv);
  }
  require_finite(p, "softmax_per_fiber");
  return p;
}

Tensor softmax_backward(const Tensor& probs, const Tensor& dprobs) {
  require_same_shape(probs.shape(), dprobs.shape(), "softmax_backward");
  const std::size_t px = probs.shape().pixels();
  const int c = probs.shape().c;
  Tensor dz(probs.shape());
  for (std::size_t i = 0; i < px; ++i) {
    const real_t* p = probs.ptr() + i * c;
    const real_t* g = dprobs.ptr() + i * c;
    double dot = 0.0;
    for (int k = 0; k < c; ++k) dot += static_cast<double>(p[k]) * g[k];
    for (int k = 0; k < c; ++k) dz[i * c + k] = static_cast<real_t>(p[k] * (g[k] - dot));
  }
  return dz;
}

}  // namespace cloudifier::ops
