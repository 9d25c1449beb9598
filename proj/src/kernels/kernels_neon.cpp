#include <arm_neon.h>

#include "g2flow/kernels.hpp"

namespace g2flow::kernels {
namespace {

void axpy_neon(std::size_t n, double a, const double* x, double* y) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

double dot_neon(std::size_t n, const double* x, const double* y) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void matvec_neon(std::size_t rows, std::size_t cols, const double* m, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_neon(cols, m + r * cols, x);
}

void line_apply_neon(std::size_t n, const double* op, std::size_t stride, std::size_t width,
                     const double* in, double* out) {
  for (std::size_t j = 0; j < n; ++j) {
    double* o = out + j * stride;
    const double* row = op + j * n;
    std::size_t c = 0;
    for (; c + 2 <= width; c += 2) {
      float64x2_t acc = vdupq_n_f64(0.0);
      for (std::size_t l = 0; l < n; ++l)
        acc = vfmaq_f64(acc, vdupq_n_f64(row[l]), vld1q_f64(in + l * stride + c));
      vst1q_f64(o + c, acc);
    }
    for (; c < width; ++c) {
      double s = 0.0;
      for (std::size_t l = 0; l < n; ++l) s += row[l] * in[l * stride + c];
      o[c] = s;
    }
  }
}

}  // namespace

const KernelTable& neon_table_unchecked() {
  static const KernelTable table{"neon", axpy_neon, dot_neon, matvec_neon, line_apply_neon};
  return table;
}

}  // namespace g2flow::kernels
