#include <cmath>
#include <string>

#include "cloudifier/ops/ops.hpp"

namespace cloudifier::ops {

BatchNormResult batch_norm(const Tensor& x, const BatchNormParams& p, BnMode mode) {
  const Shape& xs = x.shape();
  const int c = xs.c;
  const Shape vs = Shape::vec(c);
  if (p.gamma.shape() != vs || p.beta.shape() != vs || p.running_mean.shape() != vs ||
      p.running_var.shape() != vs) {
    throw ShapeError("batch_norm: parameters " + p.gamma.shape().str() + " do not match input " +
                     xs.str());
  }
  if (!(p.eps > 0)) throw ConfigError("batch_norm: eps must be positive");
  const std::size_t count = xs.pixels();
  if (count == 0) throw ShapeError("batch_norm: empty batch " + xs.str());

  BatchNormResult r;
  r.inv_std.resize(c);
  std::vector<double> mean(c, 0.0);
  if (mode == BnMode::Train) {
    std::vector<double> sq(c, 0.0);
    for (std::size_t i = 0; i < count; ++i)
      for (int ch = 0; ch < c; ++ch) mean[ch] += x[i * c + ch];
    for (int ch = 0; ch < c; ++ch) mean[ch] /= static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i)
      for (int ch = 0; ch < c; ++ch) {
        const double d = x[i * c + ch] - mean[ch];
        sq[ch] += d * d;
      }
    r.batch_var.resize(c);
    for (int ch = 0; ch < c; ++ch) {
      r.batch_var[ch] = sq[ch] / static_cast<double>(count);
      r.inv_std[ch] = 1.0 / std::sqrt(r.batch_var[ch] + p.eps);
    }
    r.batch_mean = mean;
  } else {
    for (int ch = 0; ch < c; ++ch) {
      mean[ch] = p.running_mean[ch];
      r.inv_std[ch] = 1.0 / std::sqrt(static_cast<double>(p.running_var[ch]) + p.eps);
    }
  }

  r.x_hat = Tensor(xs);
  r.y = Tensor(xs);
  for (std::size_t i = 0; i < count; ++i)
    for (int ch = 0; ch < c; ++ch) {
      const std::size_t k = i * c + ch;
      const double xh = (x[k] - mean[ch]) * r.inv_std[ch];
      r.x_hat[k] = static_cast<real_t>(xh);
      r.y[k] = static_cast<real_t>(p.gamma[ch] * xh + p.beta[ch]);
    }
  require_finite(r.y, "batch_norm");
  return r;
}

void update_running_stats(BatchNormParams& p, const BatchNormResult& r) {
  if (r.batch_mean.empty()) return;
  const double m = p.momentum;
  for (std::size_t ch = 0; ch < r.batch_mean.size(); ++ch) {
    p.running_mean[ch] = static_cast<real_t>(m * p.running_mean[ch] + (1.0 - m) * r.batch_mean[ch]);
    p.running_var[ch] = static_cast<real_t>(m * p.running_var[ch] + (1.0 - m) * r.batch_var[ch]);
  }
}

BatchNormGrads batch_norm_backward(const BatchNormResult& fwd, const Tensor& gamma, BnMode mode,
                                   const Tensor& dy) {
  const Shape& xs = fwd.x_hat.shape();
  require_same_shape(dy.shape(), xs, "batch_norm_backward");
  const int c = xs.c;
  const std::size_t count = xs.pixels();
  std::vector<double> sum_dy(c, 0.0), sum_dy_xh(c, 0.0);
  for (std::size_t i = 0; i < count; ++i)
    for (int ch = 0; ch < c; ++ch) {
      const std::size_t k = i * c + ch;
      sum_dy[ch] += dy[k];
      sum_dy_xh[ch] += static_cast<double>(dy[k]) * fwd.x_hat[k];
    }
  BatchNormGrads g{Tensor(xs), Tensor(Shape::vec(c)), Tensor(Shape::vec(c))};
  for (int ch = 0; ch < c; ++ch) {
    g.dgamma[ch] = static_cast<real_t>(sum_dy_xh[ch]);
    g.dbeta[ch] = static_cast<real_t>(sum_dy[ch]);
  }
  const double inv_count = 1.0 / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i)
    for (int ch = 0; ch < c; ++ch) {
      const std::size_t k = i * c + ch;
      const double scale = gamma[ch] * fwd.inv_std[ch];
      if (mode == BnMode::Train) {
        g.dx[k] = static_cast<real_t>(
            scale * (dy[k] - sum_dy[ch] * inv_count - fwd.x_hat[k] * sum_dy_xh[ch] * inv_count));
      } else {
        g.dx[k] = static_cast<real_t>(scale * dy[k]);
      }
    }
  return g;
}

}  // namespace cloudifier::ops
