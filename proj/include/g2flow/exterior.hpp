#pragma once
// Exterior algebra of R^7 in the strictly increasing multi-index basis.
//
// A p-form is stored as C(7,p) coefficients; basis element k of degree p is
// e^{I} with I the k-th p-subset of {0..6} in lexicographic order. Indices
// are zero based internally (e^{123} in the usual notation is {0,1,2}).

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace g2flow {

inline constexpr int kDim = 7;
inline constexpr int kMaxComponents = 35;

using Mat7 = Eigen::Matrix<double, 7, 7>;
using Vec7 = Eigen::Matrix<double, 7, 1>;

constexpr int binomial7(int p) {
  constexpr std::array<int, 8> table{1, 7, 21, 35, 35, 21, 7, 1};
  return (p < 0 || p > 7) ? 0 : table[static_cast<std::size_t>(p)];
}

class DegreeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Multi-index bookkeeping, built once.
struct Basis {
  // masks[p][k]: bitmask of the k-th p-subset.
  std::array<std::vector<std::uint8_t>, 8> masks;
  // position of a mask within its degree (valid only for masks of that degree).
  std::array<int, 128> position{};

  static const Basis& get();

  static int degree_of(std::uint8_t mask) { return __builtin_popcount(mask); }
  // Indices of mask in increasing order.
  static int indices(std::uint8_t mask, std::array<int, 7>& out);
  // Sign of the shuffle that sorts (a, b) into increasing order; 0 if they overlap.
  static int merge_sign(std::uint8_t a, std::uint8_t b);
};

class PForm {
 public:
  PForm() = default;
  explicit PForm(int degree);
  PForm(int degree, std::span<const double> coeffs);

  static PForm zero(int degree) { return PForm(degree); }
  static PForm scalar(double value);
  // Basis element from 0-based increasing indices, e.g. basis({0,1}) = e^{12}.
  static PForm basis(std::initializer_list<int> idx, double coeff = 1.0);
  // Accepts indices in any order; applies the permutation sign. 1-based.
  static PForm from_terms(int degree, std::initializer_list<std::pair<double, std::vector<int>>> terms);
  static PForm covector(const Vec7& v);

  int degree() const { return degree_; }
  std::size_t size() const { return static_cast<std::size_t>(binomial7(degree_)); }
  std::span<double> coeffs() { return {c_.data(), size()}; }
  std::span<const double> coeffs() const { return {c_.data(), size()}; }
  double& operator[](std::size_t k) { return c_[k]; }
  double operator[](std::size_t k) const { return c_[k]; }

  Eigen::Map<Eigen::VectorXd> vec() { return {c_.data(), static_cast<Eigen::Index>(size())}; }
  Eigen::Map<const Eigen::VectorXd> vec() const { return {c_.data(), static_cast<Eigen::Index>(size())}; }

  double max_abs() const;
  double norm_euclid() const;

  PForm& operator+=(const PForm& o);
  PForm& operator-=(const PForm& o);
  PForm& operator*=(double s);
  friend PForm operator+(PForm a, const PForm& b) { return a += b; }
  friend PForm operator-(PForm a, const PForm& b) { return a -= b; }
  friend PForm operator*(double s, PForm a) { return a *= s; }
  friend PForm operator-(PForm a) { return a *= -1.0; }

 private:
  int degree_ = 0;
  std::array<double, kMaxComponents> c_{};
};

PForm wedge(const PForm& a, const PForm& b);
// Contraction v ⌟ a.
PForm interior(const Vec7& v, const PForm& a);

// Euclidean Hodge star for the identity metric and orientation e^{1..7}.
PForm euclidean_star(const PForm& a);
// Sign eps(I, I^c) of the k-th basis element of degree p.
int complement_sign(int p, int k);

// p-th compound matrix: entry (I, J) = det M[I, J] over p-subsets.
Eigen::MatrixXd compound(const Mat7& m, int p);
// All compounds of degree 0..max_p from one recursion.
std::array<Eigen::MatrixXd, 8> compound_all(const Mat7& m, int max_p = 7);

// Pullback M^* a where (M^* e^i) = sum_j M(i, j) e^j, i.e. the form
// evaluated on vectors pushed forward by M.
PForm pullback(const Mat7& m, const PForm& a);

// Plain-text dump: degree, then the coefficients in basis order.
std::ostream& operator<<(std::ostream& os, const PForm& a);
PForm parse_pform(const std::string& text);

}  // namespace g2flow
