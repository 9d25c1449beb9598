#include "g2flow/lattice.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

#include "g2flow/kernels.hpp"
#include "g2flow/parallel.hpp"

namespace g2flow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 53-bit uniform on [-1, 1); independent of the standard library's
// distribution implementation so seeds reproduce across toolchains.
double draw(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

// For degree p and axis a: target index and sign of e^a ^ e^I.
struct WedgeAxisTable {
  std::array<int, kMaxComponents> target{};
  std::array<int, kMaxComponents> sign{};
};

const WedgeAxisTable& wedge_axis(int p, int axis) {
  static const auto tables = [] {
    std::array<std::array<WedgeAxisTable, 7>, 7> t{};
    const Basis& b = Basis::get();
    for (int q = 0; q < 7; ++q)
      for (int a = 0; a < 7; ++a) {
        auto& w = t[static_cast<std::size_t>(q)][static_cast<std::size_t>(a)];
        const auto am = static_cast<std::uint8_t>(1u << a);
        const auto& masks = b.masks[static_cast<std::size_t>(q)];
        for (std::size_t k = 0; k < masks.size(); ++k) {
          const int s = Basis::merge_sign(am, masks[k]);
          w.sign[k] = s;
          w.target[k] = s == 0 ? -1 : b.position[am | masks[k]];
        }
      }
    return t;
  }();
  return tables[static_cast<std::size_t>(p)][static_cast<std::size_t>(axis)];
}

std::vector<double> build_derivative(int n, double period, DerivativeScheme scheme) {
  std::vector<double> d(static_cast<std::size_t>(n * n), 0.0);
  const double h = period / n;
  auto at = [&](int j, int l) -> double& {
    return d[static_cast<std::size_t>(j * n + ((l % n) + n) % n)];
  };
  if (scheme == DerivativeScheme::spectral) {
    const double scale = kTwoPi / period;
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        if (j == l) continue;
        const int m = j - l;
        const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
        at(j, l) = scale * 0.5 * sgn / std::tan(std::numbers::pi * m / n);
      }
  } else {
    for (int j = 0; j < n; ++j) {
      at(j, j + 1) += 8.0 / (12.0 * h);
      at(j, j - 1) -= 8.0 / (12.0 * h);
      at(j, j + 2) -= 1.0 / (12.0 * h);
      at(j, j - 2) += 1.0 / (12.0 * h);
    }
  }
  return d;
}

void check_same_spec(const FormField& a, const FormField& b, const char* what) {
  if (!(a.spec() == b.spec())) throw std::invalid_argument(std::string(what) + ": lattice mismatch");
}

// Periodic Fourier cardinal function on n points, y = 2 pi (x - x_l) / L.
double fourier_cardinal(int n, double y) {
  y = std::remainder(y, kTwoPi);
  if (y == 0.0) return 1.0;
  return std::sin(0.5 * n * y) / (n * std::tan(0.5 * y));
}

}  // namespace

// ---------------------------------------------------------------------------

LatticeSpec LatticeSpec::make(std::vector<int> axes, int n, double period) {
  LatticeSpec s;
  s.active_axes = std::move(axes);
  s.n = n;
  s.periods.assign(s.active_axes.size(), period);
  s.validate();
  return s;
}

void LatticeSpec::validate() const {
  if (active_axes.size() > 3) throw std::invalid_argument("at most 3 active axes are supported");
  if (periods.size() != active_axes.size()) throw std::invalid_argument("one period per active axis required");
  for (std::size_t i = 0; i < active_axes.size(); ++i) {
    if (active_axes[i] < 0 || active_axes[i] > 6) throw std::invalid_argument("active axis out of range");
    if (i > 0 && active_axes[i] <= active_axes[i - 1])
      throw std::invalid_argument("active axes must be strictly increasing");
    if (!(periods[i] > 0.0) || !std::isfinite(periods[i])) throw std::invalid_argument("periods must be positive");
  }
  if (n < 8 || n % 2 != 0) throw std::invalid_argument("lattice resolution must be even and at least 8");
}

std::size_t LatticeSpec::sites() const {
  std::size_t s = 1;
  for (int i = 0; i < k(); ++i) s *= static_cast<std::size_t>(n);
  return s;
}

std::size_t LatticeSpec::stride(int slot) const {
  std::size_t s = 1;
  for (int i = slot + 1; i < k(); ++i) s *= static_cast<std::size_t>(n);
  return s;
}

std::array<int, 3> LatticeSpec::site_index(std::size_t site) const {
  std::array<int, 3> idx{};
  for (int s = k() - 1; s >= 0; --s) {
    idx[static_cast<std::size_t>(s)] = static_cast<int>(site % static_cast<std::size_t>(n));
    site /= static_cast<std::size_t>(n);
  }
  return idx;
}

Vec7 LatticeSpec::position(std::size_t site) const {
  Vec7 x = Vec7::Zero();
  const auto idx = site_index(site);
  for (int s = 0; s < k(); ++s)
    x(active_axes[static_cast<std::size_t>(s)]) = idx[static_cast<std::size_t>(s)] * spacing(s);
  return x;
}

double LatticeSpec::volume() const {
  double v = std::pow(kTwoPi, 7 - k());
  for (double p : periods) v *= p;
  return v;
}

// ---------------------------------------------------------------------------

FormField::FormField(LatticeSpec spec, int degree) : spec_(std::move(spec)), degree_(degree) {
  if (degree < 0 || degree > 7) throw DegreeError("field degree must lie in 0..7");
  spec_.validate();
  data_.assign(spec_.sites() * width(), 0.0);
}

FormField FormField::constant(const LatticeSpec& spec, const PForm& value) {
  FormField f(spec, value.degree());
  for (std::size_t i = 0; i < f.sites(); ++i) f.set(i, value);
  return f;
}

void FormField::set(std::size_t i, const PForm& v) {
  if (v.degree() != degree_) throw DegreeError("field degree mismatch in set");
  std::copy(v.coeffs().begin(), v.coeffs().end(), site(i).begin());
}

double FormField::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

double FormField::rms() const {
  if (data_.empty()) return 0.0;
  return std::sqrt(kernels::dot(data_, data_) / static_cast<double>(data_.size()));
}

std::vector<double> FormField::mean() const {
  std::vector<double> m(width(), 0.0);
  for (std::size_t i = 0; i < sites(); ++i) kernels::axpy(1.0, site(i), m);
  for (double& x : m) x /= static_cast<double>(sites());
  return m;
}

FormField& FormField::operator+=(const FormField& o) { return axpy(1.0, o); }
FormField& FormField::operator-=(const FormField& o) { return axpy(-1.0, o); }

FormField& FormField::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

FormField& FormField::axpy(double a, const FormField& x) {
  check_same_spec(*this, x, "axpy");
  if (x.degree_ != degree_) throw DegreeError("field degree mismatch");
  kernels::axpy(a, x.data_, data_);
  return *this;
}

double VectorField::max_abs() const {
  double m = 0.0;
  for (double x : data) m = std::max(m, std::abs(x));
  return m;
}

// ---------------------------------------------------------------------------

MetricField metric_field(const FormField& sigma) {
  if (sigma.degree() != 3) throw DegreeError("metric_field expects a 3-form field");
  MetricField m{sigma.spec(), std::vector<Metric>(sigma.sites())};
  parallel_for(sigma.sites(), [&](std::size_t i) {
    try {
      m.at[i] = metric_from_sigma(sigma.at(i));
    } catch (const DefinitenessError& e) {
      throw DefinitenessError("site " + std::to_string(i) + ": " + e.what(), e.min_eigenvalue, e.det_b);
    }
  });
  return m;
}

std::vector<G2Point> g2_points(const FormField& sigma) {
  const MetricField m = metric_field(sigma);
  std::vector<std::optional<G2Point>> tmp(sigma.sites());
  parallel_for(sigma.sites(), [&](std::size_t i) { tmp[i].emplace(sigma.at(i), m.at[i]); });
  std::vector<G2Point> pts;
  pts.reserve(sigma.sites());
  for (auto& p : tmp) pts.push_back(std::move(*p));
  return pts;
}

const std::vector<double>& derivative_matrix(const LatticeSpec& spec, int slot) {
  static std::mutex mu;
  static std::map<std::tuple<int, double, int>, std::vector<double>> cache;
  const auto key = std::make_tuple(spec.n, spec.periods[static_cast<std::size_t>(slot)], static_cast<int>(spec.scheme));
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, build_derivative(spec.n, std::get<1>(key), spec.scheme)).first;
  return it->second;
}

void partial_block(const LatticeSpec& spec, int slot, std::size_t width, std::span<const double> in,
                   std::span<double> out) {
  if (slot < 0 || slot >= spec.k()) throw std::invalid_argument("partial: slot is not an active axis");
  const auto& d = derivative_matrix(spec, slot);
  const auto n = static_cast<std::size_t>(spec.n);
  const std::size_t block = spec.stride(slot) * width;
  const std::size_t outer = spec.sites() / (n * spec.stride(slot));
  const auto& kt = kernels::active();
  parallel_for(outer, [&](std::size_t o) {
    const std::size_t base = o * n * block;
    // shift each line by its first value so constant lines differentiate to exactly 0
    thread_local std::vector<double> shifted;
    shifted.assign(in.begin() + static_cast<std::ptrdiff_t>(base),
                   in.begin() + static_cast<std::ptrdiff_t>(base + n * block));
    for (std::size_t l = n; l-- > 0;)
      for (std::size_t c = 0; c < block; ++c) shifted[l * block + c] -= shifted[c];
    kt.line_apply(n, d.data(), block, block, shifted.data(), out.data() + base);
  });
}

FormField partial(const FormField& f, int slot) {
  FormField out(f.spec(), f.degree());
  partial_block(f.spec(), slot, f.width(), f.data(), out.data());
  return out;
}

FormField exterior_derivative(const FormField& f) {
  if (f.degree() >= 7) throw DegreeError("exterior derivative of a 7-form");
  FormField out(f.spec(), f.degree() + 1);
  const std::size_t w = f.width();
  FormField df(f.spec(), f.degree());
  for (int s = 0; s < f.spec().k(); ++s) {
    partial_block(f.spec(), s, w, f.data(), df.data());
    const auto& tab = wedge_axis(f.degree(), f.spec().active_axes[static_cast<std::size_t>(s)]);
    parallel_for(f.sites(), [&](std::size_t i) {
      const auto src = df.site(i);
      auto dst = out.site(i);
      for (std::size_t c = 0; c < w; ++c)
        if (tab.sign[c] != 0) dst[static_cast<std::size_t>(tab.target[c])] += tab.sign[c] * src[c];
    });
  }
  return out;
}

namespace {

template <class StarAt>
FormField star_field(const FormField& f, StarAt&& star_at) {
  FormField out(f.spec(), 7 - f.degree());
  parallel_for(f.sites(), [&](std::size_t i) { out.set(i, star_at(i, f.at(i))); });
  return out;
}

}  // namespace

FormField hodge_star(const MetricField& g, const FormField& f) {
  return star_field(f, [&](std::size_t i, const PForm& a) { return hodge_star(g.at[i], a); });
}

FormField hodge_star(const std::vector<G2Point>& pts, const FormField& f) {
  if (pts.size() != f.sites()) throw std::invalid_argument("hodge_star: site count mismatch");
  return star_field(f, [&](std::size_t i, const PForm& a) { return pts[i].star(a); });
}

FormField codifferential(const MetricField& g, const FormField& f) {
  if (f.degree() < 1) throw DegreeError("codifferential of a 0-form");
  FormField out = hodge_star(g, exterior_derivative(hodge_star(g, f)));
  if (f.degree() % 2) out *= -1.0;
  return out;
}

FormField codifferential(const std::vector<G2Point>& pts, const FormField& f) {
  if (f.degree() < 1) throw DegreeError("codifferential of a 0-form");
  FormField out = hodge_star(pts, exterior_derivative(hodge_star(pts, f)));
  if (f.degree() % 2) out *= -1.0;
  return out;
}

FormField wedge(const FormField& a, const FormField& b) {
  check_same_spec(a, b, "wedge");
  FormField out(a.spec(), a.degree() + b.degree());
  parallel_for(a.sites(), [&](std::size_t i) { out.set(i, wedge(a.at(i), b.at(i))); });
  return out;
}

FormField wedge(const PForm& a, const FormField& b) {
  FormField out(b.spec(), a.degree() + b.degree());
  parallel_for(b.sites(), [&](std::size_t i) { out.set(i, wedge(a, b.at(i))); });
  return out;
}

FormField interior(const VectorField& v, const FormField& f) {
  if (!(v.spec == f.spec())) throw std::invalid_argument("interior: lattice mismatch");
  if (f.degree() == 0) throw DegreeError("interior product of a 0-form field");
  FormField out(f.spec(), f.degree() - 1);
  parallel_for(f.sites(), [&](std::size_t i) { out.set(i, interior(v.at(i), f.at(i))); });
  return out;
}

double integrate(const FormField& f) {
  if (f.degree() != 7 && f.degree() != 0) throw DegreeError("integrate expects a 7-form or a scalar density");
  double s = 0.0;
  for (std::size_t i = 0; i < f.sites(); ++i) s += f.site(i)[0];
  return s / static_cast<double>(f.sites()) * f.spec().volume();
}

double l2_inner(const std::vector<G2Point>& pts, const FormField& a, const FormField& b) {
  check_same_spec(a, b, "l2_inner");
  if (a.degree() != b.degree()) throw DegreeError("l2_inner: degree mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.sites(); ++i)
    s += pts[i].inner(a.at(i), b.at(i)) * pts[i].metric().vol_coeff;
  return s / static_cast<double>(a.sites()) * a.spec().volume();
}

double l2_inner_flat(const FormField& a, const FormField& b) {
  check_same_spec(a, b, "l2_inner_flat");
  if (a.degree() != b.degree()) throw DegreeError("l2_inner_flat: degree mismatch");
  return kernels::dot(a.data(), b.data()) / static_cast<double>(a.sites()) * a.spec().volume();
}

// ---------------------------------------------------------------------------

FormField random_smooth_form(const LatticeSpec& spec, int degree, int max_mode, std::uint64_t seed) {
  FormField f(spec, degree);
  if (spec.k() == 0 || max_mode <= 0) return f;
  std::mt19937_64 rng(seed);
  // Enumerate wave vectors in [-M, M]^k whose first nonzero entry is positive.
  std::vector<std::array<int, 3>> modes;
  const int span = 2 * max_mode + 1;
  int total = 1;
  for (int s = 0; s < spec.k(); ++s) total *= span;
  for (int c = 0; c < total; ++c) {
    std::array<int, 3> m{};
    int r = c;
    for (int s = spec.k() - 1; s >= 0; --s) {
      m[static_cast<std::size_t>(s)] = r % span - max_mode;
      r /= span;
    }
    int first = 0;
    for (int s = 0; s < spec.k(); ++s)
      if (m[static_cast<std::size_t>(s)] != 0) {
        first = m[static_cast<std::size_t>(s)];
        break;
      }
    if (first > 0) modes.push_back(m);
  }
  const std::size_t w = f.width();
  for (const auto& m : modes) {
    std::vector<double> a(w), b(w);
    for (std::size_t c = 0; c < w; ++c) {
      a[c] = draw(rng);
      b[c] = draw(rng);
    }
    for (std::size_t i = 0; i < f.sites(); ++i) {
      const auto idx = spec.site_index(i);
      double phase = 0.0;
      for (int s = 0; s < spec.k(); ++s)
        phase += kTwoPi * m[static_cast<std::size_t>(s)] * idx[static_cast<std::size_t>(s)] / spec.n;
      const double cs = std::cos(phase), sn = std::sin(phase);
      auto dst = f.site(i);
      for (std::size_t c = 0; c < w; ++c) dst[c] += a[c] * cs + b[c] * sn;
    }
  }
  return f;
}

FormField random_exact_3form(const LatticeSpec& spec, double amplitude, int max_mode, std::uint64_t seed) {
  if (amplitude < 0.0 || !std::isfinite(amplitude)) throw std::invalid_argument("amplitude must be >= 0");
  FormField out = exterior_derivative(random_smooth_form(spec, 2, max_mode, seed));
  const double m = out.max_abs();
  if (amplitude == 0.0 || m == 0.0) return FormField(spec, 3);
  out *= amplitude / m;
  return out;
}

// ---------------------------------------------------------------------------

void interpolate_block(const LatticeSpec& spec, std::size_t width, std::span<const double> data, const Vec7& point,
                       std::span<double> out, InterpolationScheme scheme) {
  std::fill(out.begin(), out.end(), 0.0);
  const int k = spec.k();
  if (k == 0) {
    std::copy(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(width), out.begin());
    return;
  }
  const int n = spec.n;
  // Per-axis (index, weight) lists.
  std::array<std::vector<std::pair<int, double>>, 3> wts;
  for (int s = 0; s < k; ++s) {
    const double period = spec.periods[static_cast<std::size_t>(s)];
    const double x = point(spec.active_axes[static_cast<std::size_t>(s)]);
    auto& list = wts[static_cast<std::size_t>(s)];
    const double u_node = x / spec.spacing(s);
    const double nearest = std::round(u_node);
    if (std::abs(u_node - nearest) <= 1e-13 * std::max(1.0, std::abs(u_node))) {
      // on a lattice node: return the stored value exactly
      list.emplace_back(static_cast<int>(((static_cast<long long>(nearest) % n) + n) % n), 1.0);
    } else if (scheme == InterpolationScheme::fourier) {
      for (int l = 0; l < n; ++l) {
        const double y = kTwoPi * (x - l * spec.spacing(s)) / period;
        const double w = fourier_cardinal(n, y);
        if (w != 0.0) list.emplace_back(l, w);
      }
    } else {
      const double u = x / spec.spacing(s);
      const double fl = std::floor(u);
      const double t = u - fl;
      const int i0 = static_cast<int>(fl);
      // Four-point Lagrange on nodes -1, 0, 1, 2.
      const double w[4] = {-t * (t - 1) * (t - 2) / 6.0, (t + 1) * (t - 1) * (t - 2) / 2.0,
                           -(t + 1) * t * (t - 2) / 2.0, (t + 1) * t * (t - 1) / 6.0};
      for (int q = 0; q < 4; ++q) list.emplace_back((((i0 - 1 + q) % n) + n) % n, w[q]);
    }
  }
  const auto& kt = kernels::active();
  std::function<void(int, std::size_t, double)> rec;
  rec = [&](int s, std::size_t site, double weight) {
    if (s == k) {
      kt.axpy(width, weight, data.data() + site * width, out.data());
      return;
    }
    for (const auto& [l, w] : wts[static_cast<std::size_t>(s)]) {
      rec(s + 1, site * static_cast<std::size_t>(n) + static_cast<std::size_t>(l), weight * w);
    }
  };
  rec(0, 0, 1.0);
}

PForm interpolate(const FormField& f, const Vec7& point, InterpolationScheme scheme) {
  PForm out(f.degree());
  interpolate_block(f.spec(), f.width(), f.data(), point, out.coeffs(), scheme);
  return out;
}

}  // namespace g2flow
