#pragma once
// Differential forms on a flat periodic 7-torus, sampled on a lattice over
// a few "active" coordinates; fields are constant along the other axes.
//
// Sites are ordered with the first active axis slowest. Within a site the
// C(7,p) coefficients follow the lexicographic multi-index order.

#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "g2flow/exterior.hpp"
#include "g2flow/g2_algebra.hpp"

namespace g2flow {

enum class DerivativeScheme { spectral, fd4 };
enum class InterpolationScheme { fourier, cubic };

struct LatticeSpec {
  std::vector<int> active_axes;  // 0-based coordinate ids, increasing
  int n = 16;
  std::vector<double> periods;   // one per active axis
  DerivativeScheme scheme = DerivativeScheme::spectral;

  // Throws std::invalid_argument on a malformed spec.
  static LatticeSpec make(std::vector<int> axes, int n, double period = 2.0 * std::numbers::pi);
  void validate() const;

  int k() const { return static_cast<int>(active_axes.size()); }
  std::size_t sites() const;
  std::size_t stride(int slot) const;
  double spacing(int slot) const { return periods[static_cast<std::size_t>(slot)] / n; }
  // Multi-index of a site along the active axes.
  std::array<int, 3> site_index(std::size_t site) const;
  // Coordinates of a site in R^7 (inactive coordinates are 0).
  Vec7 position(std::size_t site) const;
  // Volume of the torus: active periods times 2 pi for each inactive axis.
  double volume() const;
  bool operator==(const LatticeSpec& o) const {
    return active_axes == o.active_axes && n == o.n && periods == o.periods;
  }
};

class FormField {
 public:
  FormField() = default;
  FormField(LatticeSpec spec, int degree);
  static FormField constant(const LatticeSpec& spec, const PForm& value);

  const LatticeSpec& spec() const { return spec_; }
  int degree() const { return degree_; }
  std::size_t width() const { return static_cast<std::size_t>(binomial7(degree_)); }
  std::size_t sites() const { return spec_.sites(); }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> site(std::size_t i) { return {data_.data() + i * width(), width()}; }
  std::span<const double> site(std::size_t i) const { return {data_.data() + i * width(), width()}; }
  PForm at(std::size_t i) const { return PForm(degree_, site(i)); }
  void set(std::size_t i, const PForm& v);

  double max_abs() const;
  // Root mean square over sites and components.
  double rms() const;
  // Per-component lattice mean (the zero Fourier mode).
  std::vector<double> mean() const;

  FormField& operator+=(const FormField& o);
  FormField& operator-=(const FormField& o);
  FormField& operator*=(double s);
  // this += a * x
  FormField& axpy(double a, const FormField& x);
  friend FormField operator+(FormField a, const FormField& b) { return a += b; }
  friend FormField operator-(FormField a, const FormField& b) { return a -= b; }
  friend FormField operator*(double s, FormField a) { return a *= s; }

 private:
  LatticeSpec spec_;
  int degree_ = 0;
  std::vector<double> data_;
};

struct VectorField {
  LatticeSpec spec;
  std::vector<double> data;  // 7 per site
  VectorField() = default;
  explicit VectorField(LatticeSpec s) : spec(std::move(s)), data(spec.sites() * 7, 0.0) {}
  Vec7 at(std::size_t i) const { return Eigen::Map<const Vec7>(data.data() + 7 * i); }
  void set(std::size_t i, const Vec7& v) { Eigen::Map<Vec7>(data.data() + 7 * i) = v; }
  double max_abs() const;
};

struct MetricField {
  LatticeSpec spec;
  std::vector<Metric> at;
};

// Per-site metrics; throws DefinitenessError naming the first bad site.
MetricField metric_field(const FormField& sigma);
// Per-site G2 contexts (metric, star, projectors).
std::vector<G2Point> g2_points(const FormField& sigma);

// Derivative along active slot `slot` of an interleaved block field with
// `width` doubles per site.
void partial_block(const LatticeSpec& spec, int slot, std::size_t width, std::span<const double> in,
                   std::span<double> out);
FormField partial(const FormField& f, int slot);
// Differentiation matrix along one active slot (n x n, row-major).
const std::vector<double>& derivative_matrix(const LatticeSpec& spec, int slot);

FormField exterior_derivative(const FormField& f);
FormField hodge_star(const MetricField& g, const FormField& f);
FormField hodge_star(const std::vector<G2Point>& pts, const FormField& f);
// delta = (-1)^p * d * on p-forms.
FormField codifferential(const MetricField& g, const FormField& f);
FormField codifferential(const std::vector<G2Point>& pts, const FormField& f);

// Pointwise exterior algebra, site by site.
FormField wedge(const FormField& a, const FormField& b);
FormField wedge(const PForm& a, const FormField& b);
FormField interior(const VectorField& v, const FormField& f);

// Integral of a 7-form (its e^{1..7} coefficient) or of a scalar density.
double integrate(const FormField& f);
// L2 inner product int <a, b>_g vol_g.
double l2_inner(const std::vector<G2Point>& pts, const FormField& a, const FormField& b);
// Flat version (identity metric).
double l2_inner_flat(const FormField& a, const FormField& b);

// d of a random band-limited 2-form (modes |m_s| <= max_mode on every
// active axis), scaled so the largest coefficient equals amplitude.
FormField random_exact_3form(const LatticeSpec& spec, double amplitude, int max_mode, std::uint64_t seed);
// Random band-limited p-form (no normalization other than unit-range modes).
FormField random_smooth_form(const LatticeSpec& spec, int degree, int max_mode, std::uint64_t seed);

PForm interpolate(const FormField& f, const Vec7& point, InterpolationScheme scheme = InterpolationScheme::fourier);
// Interpolation of an interleaved block field; writes `width` values.
void interpolate_block(const LatticeSpec& spec, std::size_t width, std::span<const double> data, const Vec7& point,
                       std::span<double> out, InterpolationScheme scheme = InterpolationScheme::fourier);

// "G2F1" snapshots: magic, u32 degree, u32 k, u32 N, k x f64 periods,
// k x u8 axis ids (1-based), then little-endian f64 coefficients.
void write_snapshot(const std::string& path, const FormField& f);
FormField read_snapshot(const std::string& path);
std::vector<std::uint8_t> encode_snapshot(const FormField& f);
FormField decode_snapshot(std::span<const std::uint8_t> bytes);

}  // namespace g2flow
