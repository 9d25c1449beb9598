#include "g2flow/exterior.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace g2flow {

const Basis& Basis::get() {
  static const Basis basis = [] {
    Basis b;
    b.position.fill(-1);
    // Lexicographic order of index tuples; enumerate by recursion on the
    // smallest index so the ordering matches itertools.combinations.
    for (int p = 0; p <= 7; ++p) {
      std::vector<std::uint8_t> masks;
      std::array<int, 7> idx{};
      auto rec = [&](auto&& self, int depth, int start) -> void {
        if (depth == p) {
          std::uint8_t m = 0;
          for (int t = 0; t < p; ++t) m = static_cast<std::uint8_t>(m | (1u << idx[static_cast<std::size_t>(t)]));
          masks.push_back(m);
          return;
        }
        for (int i = start; i < 7; ++i) {
          idx[static_cast<std::size_t>(depth)] = i;
          self(self, depth + 1, i + 1);
        }
      };
      rec(rec, 0, 0);
      for (std::size_t k = 0; k < masks.size(); ++k) b.position[masks[k]] = static_cast<int>(k);
      b.masks[static_cast<std::size_t>(p)] = std::move(masks);
    }
    return b;
  }();
  return basis;
}

int Basis::indices(std::uint8_t mask, std::array<int, 7>& out) {
  int n = 0;
  for (int i = 0; i < 7; ++i)
    if (mask & (1u << i)) out[static_cast<std::size_t>(n++)] = i;
  return n;
}

int Basis::merge_sign(std::uint8_t a, std::uint8_t b) {
  if (a & b) return 0;
  int inversions = 0;
  for (int i = 0; i < 7; ++i) {
    if (!(a & (1u << i))) continue;
    // elements of b smaller than i must jump over i
    inversions += __builtin_popcount(b & ((1u << i) - 1u));
  }
  return (inversions & 1) ? -1 : 1;
}

PForm::PForm(int degree) : degree_(degree) {
  if (degree < 0 || degree > 7) throw DegreeError("form degree must lie in 0..7, got " + std::to_string(degree));
}

PForm::PForm(int degree, std::span<const double> coeffs) : PForm(degree) {
  if (coeffs.size() != size())
    throw DegreeError("coefficient count " + std::to_string(coeffs.size()) + " does not match C(7," +
                      std::to_string(degree) + ")");
  std::copy(coeffs.begin(), coeffs.end(), c_.begin());
}

PForm PForm::scalar(double value) {
  PForm f(0);
  f.c_[0] = value;
  return f;
}

PForm PForm::basis(std::initializer_list<int> idx, double coeff) {
  std::uint8_t mask = 0;
  int last = -1;
  for (int i : idx) {
    if (i <= last || i < 0 || i > 6) throw std::invalid_argument("basis indices must be increasing in 0..6");
    mask = static_cast<std::uint8_t>(mask | (1u << i));
    last = i;
  }
  PForm f(static_cast<int>(idx.size()));
  f.c_[static_cast<std::size_t>(Basis::get().position[mask])] = coeff;
  return f;
}

PForm PForm::from_terms(int degree, std::initializer_list<std::pair<double, std::vector<int>>> terms) {
  PForm f(degree);
  const Basis& b = Basis::get();
  for (const auto& [coeff, one_based] : terms) {
    if (static_cast<int>(one_based.size()) != degree) throw DegreeError("term has wrong number of indices");
    std::vector<int> idx;
    for (int i : one_based) idx.push_back(i - 1);
    int sign = 1;
    for (std::size_t s = 0; s < idx.size(); ++s)
      for (std::size_t t = s + 1; t < idx.size(); ++t) {
        if (idx[s] == idx[t]) sign = 0;
        if (idx[s] > idx[t]) sign = -sign;
      }
    if (sign == 0) continue;
    std::uint8_t mask = 0;
    for (int i : idx) mask = static_cast<std::uint8_t>(mask | (1u << i));
    f.c_[static_cast<std::size_t>(b.position[mask])] += sign * coeff;
  }
  return f;
}

PForm PForm::covector(const Vec7& v) {
  PForm f(1);
  for (int i = 0; i < 7; ++i) f.c_[static_cast<std::size_t>(i)] = v(i);
  return f;
}

double PForm::max_abs() const {
  double m = 0.0;
  for (double x : coeffs()) m = std::max(m, std::abs(x));
  return m;
}

double PForm::norm_euclid() const {
  double s = 0.0;
  for (double x : coeffs()) s += x * x;
  return std::sqrt(s);
}

PForm& PForm::operator+=(const PForm& o) {
  if (o.degree_ != degree_) throw DegreeError("adding forms of different degree");
  for (std::size_t k = 0; k < size(); ++k) c_[k] += o.c_[k];
  return *this;
}

PForm& PForm::operator-=(const PForm& o) {
  if (o.degree_ != degree_) throw DegreeError("subtracting forms of different degree");
  for (std::size_t k = 0; k < size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

PForm& PForm::operator*=(double s) {
  for (std::size_t k = 0; k < size(); ++k) c_[k] *= s;
  return *this;
}

PForm wedge(const PForm& a, const PForm& b) {
  const int p = a.degree(), q = b.degree();
  if (p + q > 7)
    throw DegreeError("wedge of degrees " + std::to_string(p) + " and " + std::to_string(q) + " exceeds 7");
  const Basis& basis = Basis::get();
  PForm out(p + q);
  const auto& ma = basis.masks[static_cast<std::size_t>(p)];
  const auto& mb = basis.masks[static_cast<std::size_t>(q)];
  for (std::size_t i = 0; i < ma.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < mb.size(); ++j) {
      if (b[j] == 0.0) continue;
      const int s = Basis::merge_sign(ma[i], mb[j]);
      if (s == 0) continue;
      out[static_cast<std::size_t>(basis.position[ma[i] | mb[j]])] += s * a[i] * b[j];
    }
  }
  return out;
}

PForm interior(const Vec7& v, const PForm& a) {
  const int p = a.degree();
  if (p == 0) throw DegreeError("interior product of a 0-form");
  const Basis& basis = Basis::get();
  PForm out(p - 1);
  const auto& masks = basis.masks[static_cast<std::size_t>(p)];
  std::array<int, 7> idx{};
  for (std::size_t k = 0; k < masks.size(); ++k) {
    if (a[k] == 0.0) continue;
    const int n = Basis::indices(masks[k], idx);
    for (int t = 0; t < n; ++t) {
      const int i = idx[static_cast<std::size_t>(t)];
      const auto rest = static_cast<std::uint8_t>(masks[k] & ~(1u << i));
      const double sign = (t & 1) ? -1.0 : 1.0;
      out[static_cast<std::size_t>(basis.position[rest])] += sign * v(i) * a[k];
    }
  }
  return out;
}

int complement_sign(int p, int k) {
  const std::uint8_t m = Basis::get().masks[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)];
  return Basis::merge_sign(m, static_cast<std::uint8_t>(~m & 0x7f));
}

PForm euclidean_star(const PForm& a) {
  const int p = a.degree();
  const Basis& basis = Basis::get();
  PForm out(7 - p);
  const auto& masks = basis.masks[static_cast<std::size_t>(p)];
  for (std::size_t k = 0; k < masks.size(); ++k) {
    const auto comp = static_cast<std::uint8_t>(~masks[k] & 0x7f);
    out[static_cast<std::size_t>(basis.position[comp])] = complement_sign(p, static_cast<int>(k)) * a[k];
  }
  return out;
}

std::array<Eigen::MatrixXd, 8> compound_all(const Mat7& m, int max_p) {
  if (max_p < 0 || max_p > 7) throw DegreeError("compound degree out of range");
  const Basis& basis = Basis::get();
  std::array<Eigen::MatrixXd, 8> out;
  out[0] = Eigen::MatrixXd::Ones(1, 1);
  std::array<int, 7> ii{}, jj{};
  for (int q = 1; q <= max_p; ++q) {
    const Eigen::MatrixXd& prev = out[static_cast<std::size_t>(q - 1)];
    const auto& masks = basis.masks[static_cast<std::size_t>(q)];
    const auto n = static_cast<Eigen::Index>(masks.size());
    Eigen::MatrixXd cur(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto mi = masks[static_cast<std::size_t>(r)];
      Basis::indices(mi, ii);
      const int i0 = ii[0];
      const auto irest = static_cast<std::uint8_t>(mi & ~(1u << i0));
      const int prow = basis.position[irest];
      for (Eigen::Index c = 0; c < n; ++c) {
        const auto mj = masks[static_cast<std::size_t>(c)];
        const int nj = Basis::indices(mj, jj);
        double det = 0.0;
        // Laplace expansion along the first row.
        for (int t = 0; t < nj; ++t) {
          const int j = jj[static_cast<std::size_t>(t)];
          const double entry = m(i0, j);
          if (entry == 0.0) continue;
          const auto jrest = static_cast<std::uint8_t>(mj & ~(1u << j));
          const double minor = prev(prow, basis.position[jrest]);
          det += ((t & 1) ? -entry : entry) * minor;
        }
        cur(r, c) = det;
      }
    }
    out[static_cast<std::size_t>(q)] = std::move(cur);
  }
  return out;
}

Eigen::MatrixXd compound(const Mat7& m, int p) {
  auto all = compound_all(m, p);
  return std::move(all[static_cast<std::size_t>(p)]);
}

PForm pullback(const Mat7& m, const PForm& a) {
  const Eigen::MatrixXd c = compound(m, a.degree());
  PForm out(a.degree());
  out.vec() = c.transpose() * a.vec();
  return out;
}

std::ostream& operator<<(std::ostream& os, const PForm& a) {
  os << a.degree();
  const auto old = os.precision(17);
  for (double x : a.coeffs()) os << ' ' << x;
  os.precision(old);
  return os;
}

PForm parse_pform(const std::string& text) {
  std::istringstream is(text);
  int degree = -1;
  if (!(is >> degree)) throw std::invalid_argument("form dump: missing degree");
  PForm f(degree);
  for (std::size_t k = 0; k < f.size(); ++k)
    if (!(is >> f[k])) throw std::invalid_argument("form dump: too few coefficients");
  double extra;
  if (is >> extra) throw std::invalid_argument("form dump: trailing data");
  return f;
}

}  // namespace g2flow
