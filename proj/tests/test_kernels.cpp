#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "g2flow/kernels.hpp"

using namespace g2flow::kernels;

namespace {

std::vector<double> randv(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<const KernelTable*> variants() {
  std::vector<const KernelTable*> v;
  if (avx2_table()) v.push_back(avx2_table());
  if (neon_table()) v.push_back(neon_table());
  return v;
}

// The scalar table is the reference; it is itself checked against plain loops.
TEST_CASE("scalar kernels match naive loops") {
  std::mt19937_64 rng(1);
  const KernelTable& s = scalar_table();
  for (std::size_t n : {0u, 1u, 7u, 35u, 64u}) {
    auto x = randv(rng, n), y = randv(rng, n), y0 = y;
    s.axpy(n, 0.75, x.data(), y.data());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(y[i] == doctest::Approx(y0[i] + 0.75 * x[i]).epsilon(1e-15));
      d += x[i] * y0[i];
    }
    CHECK(s.dot(n, x.data(), y0.data()) == doctest::Approx(d).epsilon(1e-13));
  }
  const std::size_t n = 6, stride = 5, width = 3;
  auto op = randv(rng, n * n), in = randv(rng, n * stride);
  std::vector<double> out(n * stride, 42.0);
  s.line_apply(n, op.data(), stride, width, in.data(), out.data());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t c = 0; c < width; ++c) {
      double ref = 0.0;
      for (std::size_t l = 0; l < n; ++l) ref += op[j * n + l] * in[l * stride + c];
      CHECK(out[j * stride + c] == doctest::Approx(ref).epsilon(1e-14));
    }
    for (std::size_t c = width; c < stride; ++c) CHECK(out[j * stride + c] == 42.0);
  }
}

TEST_CASE("simd kernels agree with scalar reference") {
  const auto vs = variants();
  if (vs.empty()) MESSAGE("no SIMD variant available on this CPU; scalar only");
  std::mt19937_64 rng(2);
  const KernelTable& s = scalar_table();
  for (const KernelTable* t : vs) {
    INFO("variant " << t->name);
    for (std::size_t n = 0; n < 70; n += 3) {
      auto x = randv(rng, n), y = randv(rng, n);
      auto ys = y, yv = y;
      s.axpy(n, -1.25, x.data(), ys.data());
      t->axpy(n, -1.25, x.data(), yv.data());
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ys[i] - yv[i]) <= 1e-15);
      const double ds = s.dot(n, x.data(), y.data()), dv = t->dot(n, x.data(), y.data());
      CHECK(std::abs(ds - dv) <= 1e-14 * std::max(1.0, static_cast<double>(n)));
    }
    for (std::size_t rows : {1u, 7u, 21u, 35u})
      for (std::size_t cols : {1u, 5u, 35u, 49u}) {
        auto m = randv(rng, rows * cols), x = randv(rng, cols);
        std::vector<double> a(rows), b(rows);
        s.matvec(rows, cols, m.data(), x.data(), a.data());
        t->matvec(rows, cols, m.data(), x.data(), b.data());
        for (std::size_t i = 0; i < rows; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-13);
      }
    for (std::size_t n : {4u, 8u, 16u, 32u})
      for (std::size_t width : {1u, 3u, 7u, 35u, 49u, 112u}) {
        const std::size_t stride = width + (width % 3);
        auto op = randv(rng, n * n), in = randv(rng, n * stride);
        std::vector<double> a(n * stride, 0.0), b(n * stride, 0.0);
        s.line_apply(n, op.data(), stride, width, in.data(), a.data());
        t->line_apply(n, op.data(), stride, width, in.data(), b.data());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-13);
      }
  }
}

TEST_CASE("active table is one of the known variants") {
  const KernelTable& a = active();
  const bool known = &a == &scalar_table() || &a == avx2_table() || &a == neon_table();
  CHECK(known);
}

}  // namespace
