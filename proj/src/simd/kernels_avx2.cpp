#include "cloudifier/simd/kernels.hpp"

#if defined(CLOUDIFIER_HAVE_AVX2_TU) && !defined(CLOUDIFIER_FLOAT64)

#include <immintrin.h>

#include <cstdint>

namespace cloudifier::simd {
namespace {

alignas(32) const std::int32_t kMaskTable[16] = {-1, -1, -1, -1, -1, -1, -1, -1,
                                                 0,  0,  0,  0,  0,  0,  0,  0};

// Lanes [0, count) enabled, count in [0, 8].
inline __m256i tail_mask(int count) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(kMaskTable + 8 - count));
}

// R rows of C, 16 columns.
template <int R>
inline void block16(int k, const float* a, std::ptrdiff_t a_rs, std::ptrdiff_t a_cs,
                    const float* b, std::ptrdiff_t ldb, float* c, std::ptrdiff_t ldc) {
  __m256 acc0[R];
  __m256 acc1[R];
  for (int r = 0; r < R; ++r) {
    acc0[r] = _mm256_loadu_ps(c + r * ldc);
    acc1[r] = _mm256_loadu_ps(c + r * ldc + 8);
  }
  for (int p = 0; p < k; ++p) {
    const __m256 b0 = _mm256_loadu_ps(b + p * ldb);
    const __m256 b1 = _mm256_loadu_ps(b + p * ldb + 8);
    for (int r = 0; r < R; ++r) {
      const __m256 av = _mm256_broadcast_ss(a + r * a_rs + p * a_cs);
      acc0[r] = _mm256_fmadd_ps(av, b0, acc0[r]);
      acc1[r] = _mm256_fmadd_ps(av, b1, acc1[r]);
    }
  }
  for (int r = 0; r < R; ++r) {
    _mm256_storeu_ps(c + r * ldc, acc0[r]);
    _mm256_storeu_ps(c + r * ldc + 8, acc1[r]);
  }
}

// R rows of C, `cols` (1..8) columns.
template <int R>
inline void block8(int cols, int k, const float* a, std::ptrdiff_t a_rs, std::ptrdiff_t a_cs,
                   const float* b, std::ptrdiff_t ldb, float* c, std::ptrdiff_t ldc) {
  const __m256i mask = tail_mask(cols);
  __m256 acc[R];
  for (int r = 0; r < R; ++r) acc[r] = _mm256_maskload_ps(c + r * ldc, mask);
  for (int p = 0; p < k; ++p) {
    const __m256 bv = _mm256_maskload_ps(b + p * ldb, mask);
    for (int r = 0; r < R; ++r) {
      const __m256 av = _mm256_broadcast_ss(a + r * a_rs + p * a_cs);
      acc[r] = _mm256_fmadd_ps(av, bv, acc[r]);
    }
  }
  for (int r = 0; r < R; ++r) _mm256_maskstore_ps(c + r * ldc, mask, acc[r]);
}

template <int R>
inline void row_panel(int n, int k, const float* a, std::ptrdiff_t a_rs, std::ptrdiff_t a_cs,
                      const float* b, std::ptrdiff_t ldb, float* c, std::ptrdiff_t ldc) {
  int j = 0;
  for (; j + 16 <= n; j += 16) block16<R>(k, a, a_rs, a_cs, b + j, ldb, c + j, ldc);
  for (; j < n; j += 8) {
    const int cols = n - j < 8 ? n - j : 8;
    block8<R>(cols, k, a, a_rs, a_cs, b + j, ldb, c + j, ldc);
  }
}

void gemm_avx2(int m, int n, int k, const float* a, std::ptrdiff_t a_rs, std::ptrdiff_t a_cs,
               const float* b, std::ptrdiff_t ldb, float* c, std::ptrdiff_t ldc) {
  // K is split so a 4x16 panel's B rows stay in L1 across the row loop.
  constexpr int kBlockK = 256;
  for (int p0 = 0; p0 < k; p0 += kBlockK) {
    const int kc = k - p0 < kBlockK ? k - p0 : kBlockK;
    const float* ap = a + p0 * a_cs;
    const float* bp = b + p0 * ldb;
    int i = 0;
    for (; i + 4 <= m; i += 4) row_panel<4>(n, kc, ap + i * a_rs, a_rs, a_cs, bp, ldb, c + i * ldc, ldc);
    for (; i < m; ++i) row_panel<1>(n, kc, ap + i * a_rs, a_rs, a_cs, bp, ldb, c + i * ldc, ldc);
  }
}

void mul_add_avx2(std::size_t n, const float* a, const float* b, float* y) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 r = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i),
                                     _mm256_loadu_ps(y + i));
    _mm256_storeu_ps(y + i, r);
  }
  if (i < n) {
    const __m256i mask = tail_mask(static_cast<int>(n - i));
    const __m256 r = _mm256_fmadd_ps(_mm256_maskload_ps(a + i, mask), _mm256_maskload_ps(b + i, mask),
                                     _mm256_maskload_ps(y + i, mask));
    _mm256_maskstore_ps(y + i, mask, r);
  }
}

void axpy_avx2(std::size_t n, float alpha, const float* x, float* y) {
  const __m256 av = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(av, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void relu_avx2(std::size_t n, const float* x, float* y) {
  const __m256 zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    // maxps returns its second operand when the first is NaN; NaN maps to 0
    // as in the scalar path.
    _mm256_storeu_ps(y + i, _mm256_max_ps(_mm256_loadu_ps(x + i), zero));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void add_avx2(std::size_t n, const float* a, const float* b, float* y) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  }
  for (; i < n; ++i) y[i] = a[i] + b[i];
}

const KernelTable kAvx2Table{Isa::Avx2, "avx2", gemm_avx2, mul_add_avx2,
                             axpy_avx2, relu_avx2, add_avx2};

}  // namespace

namespace detail {
const KernelTable* avx2_table_if_compiled() { return &kAvx2Table; }
}  // namespace detail

}  // namespace cloudifier::simd

#else

namespace cloudifier::simd::detail {
const KernelTable* avx2_table_if_compiled() { return nullptr; }
}  // namespace cloudifier::simd::detail

#endif
