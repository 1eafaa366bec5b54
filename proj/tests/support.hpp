#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "cloudifier/rng.hpp"
#include "cloudifier/tensor.hpp"

namespace cloudifier::test {

inline Tensor random_tensor(Shape s, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  Tensor t(s);
  for (auto& v : t.data()) v = static_cast<real_t>(rng.uniform(lo, hi));
  return t;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(double(a[i]) - double(b[i])));
  return m;
}

inline bool bit_equal(const Tensor& a, const Tensor& b) {
  if (!(a.shape() == b.shape())) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

// Direct correlation with zero padding: six nested loops plus the batch.
// kernel (kh, kw, ci, co).
inline Tensor brute_conv(const Tensor& x, const Tensor& k, const Tensor& bias, int stride, int pad_top,
                         int pad_left, int out_h, int out_w) {
  const Shape xs = x.shape(), ks = k.shape();
  Tensor y(Shape{xs.n, out_h, out_w, ks.c});
  for (int n = 0; n < xs.n; ++n)
    for (int oy = 0; oy < out_h; ++oy)
      for (int ox = 0; ox < out_w; ++ox)
        for (int co = 0; co < ks.c; ++co) {
          double acc = bias.empty() ? 0.0 : double(bias[static_cast<std::size_t>(co)]);
          for (int ky = 0; ky < ks.n; ++ky)
            for (int kx = 0; kx < ks.h; ++kx)
              for (int ci = 0; ci < ks.w; ++ci) {
                const int iy = oy * stride + ky - pad_top, ix = ox * stride + kx - pad_left;
                if (iy < 0 || ix < 0 || iy >= xs.h || ix >= xs.w) continue;
                acc += double(x(n, iy, ix, ci)) * double(k(ky, kx, ci, co));
              }
          y(n, oy, ox, co) = static_cast<real_t>(acc);
        }
  return y;
}

// Symmetric central difference of a scalar function of one tensor entry.
inline double central_difference(const std::function<double()>& f, real_t& slot, double h) {
  const real_t saved = slot;
  slot = static_cast<real_t>(double(saved) + h);
  const double up = f();
  slot = static_cast<real_t>(double(saved) - h);
  const double down = f();
  slot = saved;
  return (up - down) / (2.0 * h);
}

// |a - n| / max(|a|, |n|, floor); the floor keeps near-zero gradients from
// dominating the ratio.
inline double relative_error(double analytic, double numeric, double floor = 1e-2) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

#if defined(CLOUDIFIER_FLOAT64)
inline constexpr double kFdStep = 1e-6;
#else
inline constexpr double kFdStep = 1e-3;
#endif

}  // namespace cloudifier::test
