#pragma once
// Dense inner-loop kernels shared by the field code.
//
// Every kernel has a scalar reference implementation; SIMD variants
// (AVX2+FMA on x86-64, NEON on aarch64) are selected once at startup.
// Setting G2FLOW_SIMD=off in the environment forces the scalar table.

#include <cstddef>
#include <span>
#include <string_view>

namespace g2flow::kernels {

struct KernelTable {
  std::string_view name;
  // y += a * x
  void (*axpy)(std::size_t n, double a, const double* x, double* y);
  // sum_i x[i] * y[i]
  double (*dot)(std::size_t n, const double* x, const double* y);
  // y = M x, M row-major rows x cols
  void (*matvec)(std::size_t rows, std::size_t cols, const double* m, const double* x, double* y);
  // Applies an n x n operator along one lattice direction for a block of
  // `width` contiguous doubles per point:
  //   out[j*stride + c] = sum_l op[j*n + l] * in[l*stride + c],  c < width
  void (*line_apply)(std::size_t n, const double* op, std::size_t stride, std::size_t width,
                     const double* in, double* out);
};

const KernelTable& scalar_table();
// nullptr when the variant is not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_table();
const KernelTable* neon_table();

// Table chosen for this process.
const KernelTable& active();

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(x.size(), a, x.data(), y.data());
}
inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.size(), x.data(), y.data());
}
inline void matvec(std::size_t rows, std::size_t cols, const double* m, const double* x, double* y) {
  active().matvec(rows, cols, m, x, y);
}

}  // namespace g2flow::kernels
