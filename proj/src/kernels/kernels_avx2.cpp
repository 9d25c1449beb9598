// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "g2flow/kernels.hpp"

namespace g2flow::kernels {
namespace {

void axpy_avx2(std::size_t n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(std::size_t n, const double* x, const double* y) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void matvec_avx2(std::size_t rows, std::size_t cols, const double* m, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_avx2(cols, m + r * cols, x);
}

void line_apply_avx2(std::size_t n, const double* op, std::size_t stride, std::size_t width,
                     const double* in, double* out) {
  for (std::size_t j = 0; j < n; ++j) {
    double* o = out + j * stride;
    const double* row = op + j * n;
    std::size_t c = 0;
    for (; c + 4 <= width; c += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t l = 0; l < n; ++l)
        acc = _mm256_fmadd_pd(_mm256_set1_pd(row[l]), _mm256_loadu_pd(in + l * stride + c), acc);
      _mm256_storeu_pd(o + c, acc);
    }
    for (; c < width; ++c) {
      double s = 0.0;
      for (std::size_t l = 0; l < n; ++l) s += row[l] * in[l * stride + c];
      o[c] = s;
    }
  }
}

}  // namespace

const KernelTable& avx2_table_unchecked() {
  static const KernelTable table{"avx2", axpy_avx2, dot_avx2, matvec_avx2, line_apply_avx2};
  return table;
}

}  // namespace g2flow::kernels
