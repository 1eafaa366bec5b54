#include "cloudifier/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace cloudifier {

std::string Shape::str() const {
  return "(" + std::to_string(n) + "," + std::to_string(h) + "," + std::to_string(w) + "," +
         std::to_string(c) + ")";
}

Tensor::Tensor(Shape shape, real_t fill) : shape_(shape) {
  if (shape.n < 0 || shape.h < 0 || shape.w < 0 || shape.c < 0) {
    throw ShapeError("negative tensor extent " + shape.str());
  }
  data_.assign(shape.size(), fill);
}

Tensor::Tensor(Shape shape, std::vector<real_t> values) : shape_(shape), data_(std::move(values)) {
  if (data_.size() != shape.size()) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape.str());
  }
}

void Tensor::fill(real_t v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](real_t v) { return std::isfinite(v); });
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape.size() != size()) {
    throw ShapeError("cannot reshape " + shape_.str() + " to " + shape.str());
  }
  return Tensor(shape, data_);
}

void require_same_shape(const Shape& a, const Shape& b, const char* op) {
  if (a != b) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.str() + " vs " + b.str());
  }
}

void require_finite(const Tensor& t, const char* op) {
  if (!t.all_finite()) {
    throw NumericError(std::string(op) + ": non-finite value in output of shape " +
                       t.shape().str());
  }
}

}  // namespace cloudifier
