#include <algorithm>

#include "cloudifier/simd/kernels.hpp"

namespace cloudifier::simd {
namespace {

void gemm_scalar(int m, int n, int k, const real_t* a, std::ptrdiff_t a_rs, std::ptrdiff_t a_cs,
                 const real_t* b, std::ptrdiff_t ldb, real_t* c, std::ptrdiff_t ldc) {
  for (int i = 0; i < m; ++i) {
    real_t* crow = c + i * ldc;
    for (int p = 0; p < k; ++p) {
      const real_t av = a[i * a_rs + p * a_cs];
      const real_t* brow = b + p * ldb;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void mul_add_scalar(std::size_t n, const real_t* a, const real_t* b, real_t* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a[i] * b[i];
}

void axpy_scalar(std::size_t n, real_t alpha, const real_t* x, real_t* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void relu_scalar(std::size_t n, const real_t* x, real_t* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > real_t{0} ? x[i] : real_t{0};
}

void add_scalar(std::size_t n, const real_t* a, const real_t* b, real_t* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] + b[i];
}

}  // namespace

namespace detail {
const KernelTable kScalarTable{Isa::Scalar, "scalar", gemm_scalar, mul_add_scalar,
                               axpy_scalar, relu_scalar, add_scalar};
}  // namespace detail

}  // namespace cloudifier::simd
