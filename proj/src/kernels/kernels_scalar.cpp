#include "g2flow/kernels.hpp"

namespace g2flow::kernels {
namespace {

void axpy_scalar(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot_scalar(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void matvec_scalar(std::size_t rows, std::size_t cols, const double* m, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(cols, m + r * cols, x);
}

void line_apply_scalar(std::size_t n, const double* op, std::size_t stride, std::size_t width,
                       const double* in, double* out) {
  for (std::size_t j = 0; j < n; ++j) {
    double* o = out + j * stride;
    for (std::size_t c = 0; c < width; ++c) o[c] = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      const double w = op[j * n + l];
      if (w == 0.0) continue;
      axpy_scalar(width, w, in + l * stride, o);
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", axpy_scalar, dot_scalar, matvec_scalar, line_apply_scalar};
  return table;
}

}  // namespace g2flow::kernels
