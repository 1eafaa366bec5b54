#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "cloudifier/common.hpp"

namespace cloudifier {

// Rank-4 extent. Activations use (batch, rows, cols, channels); kernels use
// (kh, kw, c_in, c_out); vectors are (1, 1, 1, c).
struct Shape {
  int n = 0;
  int h = 0;
  int w = 0;
  int c = 0;

  constexpr std::size_t size() const noexcept {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(h) *
           static_cast<std::size_t>(w) * static_cast<std::size_t>(c);
  }
  constexpr std::size_t pixels() const noexcept {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(h) *
           static_cast<std::size_t>(w);
  }
  static constexpr Shape vec(int c) noexcept { return {1, 1, 1, c}; }
  std::string str() const;

  friend constexpr bool operator==(const Shape&, const Shape&) = default;
};

// Dense float tensor, channel fastest-varying:
//   index(n, y, x, c) = ((n * h + y) * w + x) * c_count + c
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, real_t fill = real_t{0});
  Tensor(Shape shape, std::vector<real_t> values);

  static Tensor zeros(Shape shape) { return Tensor(shape); }
  static Tensor scalar(real_t v) { return Tensor(Shape{1, 1, 1, 1}, v); }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<real_t> data() noexcept { return data_; }
  std::span<const real_t> data() const noexcept { return data_; }
  real_t* ptr() noexcept { return data_.data(); }
  const real_t* ptr() const noexcept { return data_.data(); }

  std::size_t index(int n, int y, int x, int c) const noexcept {
    return ((static_cast<std::size_t>(n) * shape_.h + y) * shape_.w + x) * shape_.c + c;
  }
  real_t& operator()(int n, int y, int x, int c) noexcept { return data_[index(n, y, x, c)]; }
  real_t operator()(int n, int y, int x, int c) const noexcept { return data_[index(n, y, x, c)]; }
  real_t& operator[](std::size_t i) noexcept { return data_[i]; }
  real_t operator[](std::size_t i) const noexcept { return data_[i]; }

  void fill(real_t v);
  bool all_finite() const noexcept;
  // Same data reinterpreted under a shape with identical element count.
  Tensor reshaped(Shape shape) const;

 private:
  Shape shape_{};
  std::vector<real_t> data_;
};

// Throws ShapeError if `a` and `b` differ, naming both shapes.
void require_same_shape(const Shape& a, const Shape& b, const char* op);
// Throws NumericError naming `op` if `t` contains NaN or Inf.
void require_finite(const Tensor& t, const char* op);

}  // namespace cloudifier
