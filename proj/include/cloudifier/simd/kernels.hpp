#pragma once

#include <cstddef>

#include "cloudifier/common.hpp"

namespace cloudifier::simd {

enum class Isa { Scalar, Avx2 };

// Inner loops shared by the tensor ops. Every entry has a scalar reference
// implementation; vector variants must agree with it up to summation order.
struct KernelTable {
  Isa isa;
  const char* name;

  // C[i,j] += sum_p A[i*a_rs + p*a_cs] * B[p*ldb + j]   (i<m, j<n, p<k)
  // a_rs/a_cs let the same kernel serve A and A^T.
  void (*gemm)(int m, int n, int k, const real_t* a, std::ptrdiff_t a_rs, std::ptrdiff_t a_cs,
               const real_t* b, std::ptrdiff_t ldb, real_t* c, std::ptrdiff_t ldc);
  // y[i] += a[i] * b[i]
  void (*mul_add)(std::size_t n, const real_t* a, const real_t* b, real_t* y);
  // y[i] += alpha * x[i]
  void (*axpy)(std::size_t n, real_t alpha, const real_t* x, real_t* y);
  // y[i] = max(x[i], 0)
  void (*relu)(std::size_t n, const real_t* x, real_t* y);
  // y[i] = a[i] + b[i]
  void (*add)(std::size_t n, const real_t* a, const real_t* b, real_t* y);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in, the CPU lacks AVX2+FMA, or
// the build uses 64-bit reals.
const KernelTable* avx2_kernels();

// The table used by the tensor ops. Chosen on first use: the best available
// ISA, unless CLOUDIFIER_ISA=scalar is set in the environment.
const KernelTable& kernels();

// Forces a table; throws ConfigError if it is unavailable.
void select_isa(Isa isa);
Isa active_isa();
const char* isa_name(Isa isa);

namespace detail {
extern const KernelTable kScalarTable;
const KernelTable* avx2_table_if_compiled();
}  // namespace detail

}  // namespace cloudifier::simd
